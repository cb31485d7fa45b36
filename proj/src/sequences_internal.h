// Copyright 2026 The mixedion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MIXEDION_SEQUENCES_INTERNAL_H
#define MIXEDION_SEQUENCES_INTERNAL_H

#include <array>

#include "mixedion/sequences.h"

namespace mixedion::detail {

void append_ramsey_ms(Sequence &seq, const MSDriveParams &drive, const std::array<double, 2> &corrections,
                      double ms_adjust, const std::array<double, 2> &stark_phase, const IonSystem &system);

}  // namespace mixedion::detail

#endif
