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

#ifndef MIXEDION_ESTIMATORS_H
#define MIXEDION_ESTIMATORS_H

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mixedion/readout.h"
#include "mixedion/sequences.h"

namespace mixedion {

/// n equally spaced phases on [0, 2π).
std::vector<double> phase_grid(int n);

struct ParityCurve {
    std::vector<CurvePoint> points;  // x = analysis phase, y = parity
    SinusoidFit fit;                 // k = 2
    SinusoidFit fit_k1;              // first harmonic of the residual after `fit`
};

/// Builds the sequence for one analysis phase (applied to both ions).
using PhaseTemplate = std::function<Sequence(double)>;

/// Parity P↑↑ + P↓↓ − P↑↓ − P↓↑ at each grid phase. Shot indices run
/// consecutively from first_shot across the grid.
ParityCurve parity_scan(const Executor &executor, const PhaseTemplate &make, const std::vector<double> &grid,
                        long shots_per_point, const InitialEnsemble &ensemble, std::uint64_t seed,
                        std::uint64_t first_shot = 0);

/// Noiseless parity curve from exact thermal averages.
ParityCurve exact_parity_curve(const Executor &executor, const PhaseTemplate &make, const std::vector<double> &grid,
                               const InitialEnsemble &ensemble);

/// Builds the sequence for analysis phases (Be, Mg).
using SettingsTemplate = std::function<Sequence(std::array<double, 2>)>;

struct CHSHResult {
    CHSHSettings settings;
    std::array<double, 4> e{0, 0, 0, 0};  // E(a,b), E(a,b′), E(a′,b), E(a′,b′)
    std::array<double, 4> e_stderr{0, 0, 0, 0};
    double b = 0;
    double b_stderr = 0;
    double phase_offset = 0;  // φ₀ removed from the settings
    std::string convention;
};

/// Runs the four settings with shots_per_setting each. Both analysis phases
/// are shifted by −φ₀/2, where φ₀ is the phase of the noiseless parity
/// oscillation cos(2φ + φ₀), so E(a, b) = cos(a + b) for the ideal state.
CHSHResult chsh(const Executor &executor, const SettingsTemplate &make, const CHSHSettings &settings,
                long shots_per_setting, const InitialEnsemble &ensemble, std::uint64_t seed,
                std::uint64_t first_shot = 0);

/// Fitted k = 1 contrast 2A of P(Mg ↓) over the θ or φ grid from records.
double population_contrast(const std::vector<CurvePoint> &curve, SinusoidFit *fit = nullptr);

/// P(species ↓) from records with its binomial standard error.
CurvePoint down_fraction(double x, const std::vector<ShotRecord> &records, Species species);

/// Noiseless action of `seq` on the spin basis with the mode in |n⟩, projected
/// back onto motional level n. Columns are indexed by the input spin state.
SpinMatrix spin_unitary(const Executor &executor, const Sequence &seq, int n = 0, int n_max = 16);

/// max |U − e^{iγ}V| elementwise with γ = arg tr(V†U).
double gate_distance(const SpinMatrix &u, const SpinMatrix &v);

}  // namespace mixedion

#endif
