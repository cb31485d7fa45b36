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

#ifndef MIXEDION_READOUT_H
#define MIXEDION_READOUT_H

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mixedion/fockspace.h"
#include "mixedion/rng.h"

namespace mixedion {

struct SpeciesDetector {
    double bright_mean = 30;      // photons
    double dark_mean = 3.5;       // photons
    double detect_duration = 0;   // s
    int threshold = -1;           // counts above this are bright; −1 selects optimal_threshold

    void validate() const;
    bool operator==(const SpeciesDetector &) const = default;
};

struct DetectorModel {
    std::array<SpeciesDetector, 2> species{SpeciesDetector{30, 3.5, 330e-6, -1},
                                           SpeciesDetector{30, 3.5, 200e-6, -1}};

    const SpeciesDetector &operator[](Species s) const { return species[idx(s)]; }
    SpeciesDetector &operator[](Species s) { return species[idx(s)]; }
    void validate() const;
    bool operator==(const DetectorModel &) const = default;
    /// Threshold in use for `s`, resolving −1 to the optimal value.
    int threshold(Species s) const;
};

/// P(N ≤ k) for N ~ Poisson(mean).
double poisson_cdf(int k, double mean);

/// Integer t minimizing P(N ≤ t | bright) + P(N > t | dark).
int optimal_threshold(const SpeciesDetector &det);

struct ClassificationError {
    double bright_as_dark = 0;  // P(N ≤ t | bright)
    double dark_as_bright = 0;  // P(N > t | dark)
    double mean() const { return (bright_as_dark + dark_as_bright) / 2; }
};
ClassificationError classification_error(const SpeciesDetector &det, int threshold);

/// Shot flags.
enum ShotFlag : std::uint32_t {
    kFlagVacuumJump = 1u << 0,    // a heating jump tried to lower the vacuum
    kFlagCutoffTail = 1u << 1,    // population above 1e-6 reached n_max
    kFlagScatter = 1u << 2,       // at least one scattering event
    kFlagHeating = 1u << 3,       // at least one heating jump applied
    kFlagNotMeasured = 1u << 4,   // sequence had no Measure pulse
};

struct ShotRecord {
    std::uint64_t shot = 0;
    int initial_n = 0;
    int true_outcome = 0;            // joint spin index after projection and detection flips
    int outcome = 0;                 // joint spin index from thresholded counts
    std::array<int, 2> counts{0, 0};
    std::array<double, 2> analysis{0, 0};  // analysis phases of the sequence, rad
    std::uint32_t flags = 0;

    bool operator==(const ShotRecord &) const = default;
};

/// Born-rule sample of the joint spin outcome; collapses `psi` in place.
int project_spins(Eigen::VectorXcd &psi, const RegisterShape &shape, double u);
std::pair<int, QuantumState> project_spins(const QuantumState &state, Rng &rng);

std::array<int, 2> photon_counts(int outcome, const DetectorModel &det, Rng &rng);

/// Joint outcome from counts: bright (↑) when count > threshold.
int classify(const std::array<int, 2> &counts, const DetectorModel &det);

struct CurvePoint {
    double x = 0;
    double y = 0;
    double stderr_ = 0;
};

struct SinusoidFit {
    double amplitude = 0;  // ≥ 0
    double phase = 0;      // wrapped to (−π, π]
    double offset = 0;
    double residual = 0;   // root-mean-square residual
    double amplitude_stderr = 0;
    bool degenerate = false;
};

/// Least squares fit of A·cos(k·x + φ₀) + c. Points with positive stderr_
/// are weighted by 1/stderr_².
SinusoidFit fit_sinusoid(const std::vector<CurvePoint> &curve, int k);

/// Empirical joint-outcome frequencies and binomial standard errors.
struct Populations {
    std::array<double, 4> p{0, 0, 0, 0};
    std::array<double, 4> stderr_{0, 0, 0, 0};
    long shots = 0;
};
Populations populations(const std::vector<ShotRecord> &records);

/// P↑↑ + P↓↓ − P↑↓ − P↓↑ with its standard error.
std::pair<double, double> parity(const std::vector<ShotRecord> &records);

struct BellEstimate {
    std::array<double, 4> populations{0, 0, 0, 0};
    double contrast = 0;
    double fidelity = 0;
    double fidelity_stderr = 0;
};

/// F = (P↑↑ + P↓↓)/2 + C/2, clamped to [0, 1]. Throws DataInconsistency when
/// C exceeds 1 by more than three standard errors.
BellEstimate bell_fidelity(const std::array<double, 4> &pops, double contrast, double pops_stderr = 0,
                           double contrast_stderr = 0);

struct CHSHSettings {
    std::array<double, 2> be{0, kPi / 2};
    std::array<double, 2> mg{kPi / 4, 3 * kPi / 4};

    void validate() const;
    bool operator==(const CHSHSettings &) const = default;
};

/// E(a,b), E(a,b′), E(a′,b), E(a′,b′) combined as
/// |E(a,b) − E(a,b′)| + |E(a′,b) + E(a′,b′)|.
double chsh_combine(const std::array<double, 4> &e);

/// ⟨σ_a ⊗ σ_b⟩ estimated as the outcome parity and its standard error.
std::pair<double, double> correlation(const std::vector<ShotRecord> &records);

}  // namespace mixedion

#endif
