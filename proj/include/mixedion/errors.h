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

#ifndef MIXEDION_ERRORS_H
#define MIXEDION_ERRORS_H

#include <stdexcept>
#include <string>

namespace mixedion {

/// Invalid parameter values or combinations supplied by the caller.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Fock cutoff too small for the requested thermal state or dynamics.
struct CutoffTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The fixed-step integrator did not converge within its step budget.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A calibration was used with parameters it was not produced for.
struct StaleCalibration : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Measured estimator inputs are statistically inconsistent.
struct DataInconsistency : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mixedion

#endif
