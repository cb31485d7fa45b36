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

#include "mixedion/estimators.h"

#include <cmath>

#include "mixedion/errors.h"

namespace mixedion {

namespace {

// First-harmonic fit of what the second harmonic leaves, so its uncertainty
// reflects scatter rather than the dominant oscillation.
SinusoidFit first_harmonic(const std::vector<CurvePoint> &points, const SinusoidFit &second) {
    std::vector<CurvePoint> rest = points;
    for (CurvePoint &c : rest) {
        c.y -= second.amplitude * std::cos(2 * c.x + second.phase) + second.offset;
        c.stderr_ = 0;
    }
    return fit_sinusoid(rest, 1);
}

}  // namespace

std::vector<double> phase_grid(int n) {
    if (n < 1) throw ConfigError("phase_grid: need at least one point");
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k) g[k] = kTwoPi * k / n;
    return g;
}

ParityCurve parity_scan(const Executor &executor, const PhaseTemplate &make, const std::vector<double> &grid,
                        long shots_per_point, const InitialEnsemble &ensemble, std::uint64_t seed,
                        std::uint64_t first_shot) {
    if (grid.size() < 8) throw ConfigError("parity_scan: grid needs at least 8 points");
    ParityCurve curve;
    std::uint64_t shot = first_shot;
    for (double phi : grid) {
        auto records = executor.execute(make(phi), ensemble, shots_per_point, seed, shot);
        shot += shots_per_point;
        auto [p, err] = parity(records);
        curve.points.push_back({phi, p, err});
    }
    // Weighting by binomial errors breaks down at |parity| = 1; fit unweighted.
    std::vector<CurvePoint> plain = curve.points;
    for (CurvePoint &c : plain) c.stderr_ = 0;
    curve.fit = fit_sinusoid(plain, 2);
    curve.fit_k1 = first_harmonic(plain, curve.fit);
    return curve;
}

ParityCurve exact_parity_curve(const Executor &executor, const PhaseTemplate &make, const std::vector<double> &grid,
                               const InitialEnsemble &ensemble) {
    ParityCurve curve;
    for (double phi : grid) {
        auto p = executor.thermal_populations(make(phi), ensemble);
        curve.points.push_back({phi, p[0] + p[3] - p[1] - p[2], 0});
    }
    curve.fit = fit_sinusoid(curve.points, 2);
    curve.fit_k1 = first_harmonic(curve.points, curve.fit);
    return curve;
}

CHSHResult chsh(const Executor &executor, const SettingsTemplate &make, const CHSHSettings &settings,
                long shots_per_setting, const InitialEnsemble &ensemble, std::uint64_t seed,
                std::uint64_t first_shot) {
    settings.validate();
    CHSHResult r;
    r.settings = settings;
    ParityCurve ref = exact_parity_curve(
        executor, [&](double phi) { return make({phi, phi}); }, phase_grid(16), ensemble);
    r.phase_offset = ref.fit.phase;
    const std::array<std::array<double, 2>, 4> combos{{{settings.be[0], settings.mg[0]},
                                                       {settings.be[0], settings.mg[1]},
                                                       {settings.be[1], settings.mg[0]},
                                                       {settings.be[1], settings.mg[1]}}};
    std::uint64_t shot = first_shot;
    double var = 0;
    for (int k = 0; k < 4; ++k) {
        std::array<double, 2> phases{combos[k][0] - r.phase_offset / 2, combos[k][1] - r.phase_offset / 2};
        auto records = executor.execute(make(phases), ensemble, shots_per_setting, seed, shot);
        shot += shots_per_setting;
        auto [e, err] = correlation(records);
        r.e[k] = e;
        r.e_stderr[k] = err;
        var += err * err;
    }
    r.b = chsh_combine(r.e);
    r.b_stderr = std::sqrt(var);
    r.convention =
        "E = P(same) - P(different); B = |E(a,b) - E(a,b')| + |E(a',b) + E(a',b')|; "
        "analysis phases shifted by -phi0/2 with phi0 from the noiseless parity fit cos(2 phi + phi0)";
    return r;
}

double population_contrast(const std::vector<CurvePoint> &curve, SinusoidFit *fit) {
    std::vector<CurvePoint> plain = curve;
    for (CurvePoint &c : plain) c.stderr_ = 0;
    SinusoidFit f = fit_sinusoid(plain, 1);
    if (fit) *fit = f;
    return 2 * f.amplitude;
}

CurvePoint down_fraction(double x, const std::vector<ShotRecord> &records, Species species) {
    long down = 0;
    for (const ShotRecord &r : records) down += level_of(r.outcome, species) == Level::Down;
    double n = static_cast<double>(records.size());
    double p = n > 0 ? down / n : 0;
    return {x, p, n > 0 ? std::sqrt(p * (1 - p) / n) : 0};
}

SpinMatrix spin_unitary(const Executor &executor, const Sequence &seq, int n, int n_max) {
    if (n < 0 || n > n_max) throw ConfigError("spin_unitary: Fock level outside the register");
    RegisterShape shape(n_max);
    SpinMatrix u;
    for (int c = 0; c < 4; ++c) {
        SpinVector v = SpinVector::Zero();
        v(c) = 1;
        QuantumState out = executor.evolve(seq, QuantumState::product(v, n, shape));
        for (int r = 0; r < 4; ++r) u(r, c) = out.amplitude(r, n);
    }
    return u;
}

double gate_distance(const SpinMatrix &u, const SpinMatrix &v) {
    cplx overlap = (v.adjoint() * u).trace();
    cplx phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : cplx(1, 0);
    return (u - phase * v).cwiseAbs().maxCoeff();
}

}  // namespace mixedion
