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

#ifndef MIXEDION_RNG_H
#define MIXEDION_RNG_H

#include <cstdint>
#include <random>

namespace mixedion {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Independent random streams per shot. Each noise source draws from its own
/// stream so toggling one source leaves every other draw unchanged.
enum class Stream : std::uint64_t {
    Thermal = 1,
    Drift,
    Dephasing,
    Spam,
    Scatter,
    Heating,
    Measure,
    Photons,
};

using Rng = std::mt19937_64;

inline Rng shot_rng(std::uint64_t master_seed, std::uint64_t shot, Stream stream) {
    std::uint64_t s = splitmix64(master_seed);
    s = splitmix64(s ^ shot);
    s = splitmix64(s ^ static_cast<std::uint64_t>(stream));
    return Rng(s);
}

/// Uniform double in [0, 1) using the top 53 bits.
inline double uniform01(Rng &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace mixedion

#endif
