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

#include "mixedion/readout.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "mixedion/errors.h"

namespace mixedion {

void SpeciesDetector::validate() const {
    if (!(dark_mean >= 0)) throw ConfigError("detector: dark_mean must be non-negative");
    if (!(bright_mean > dark_mean)) throw ConfigError("detector: bright_mean must exceed dark_mean");
    if (!(detect_duration >= 0)) throw ConfigError("detector: detect_duration must be non-negative");
    if (threshold < -1) throw ConfigError("detector: threshold must be >= 0 (or -1 for optimal)");
}

void DetectorModel::validate() const {
    for (const SpeciesDetector &d : species) d.validate();
}

int DetectorModel::threshold(Species s) const {
    const SpeciesDetector &d = species[idx(s)];
    return d.threshold >= 0 ? d.threshold : optimal_threshold(d);
}

double poisson_cdf(int k, double mean) {
    if (k < 0) return 0;
    if (mean == 0) return 1;
    double sum = 0;
    for (int j = 0; j <= k; ++j) {
        sum += std::exp(j * std::log(mean) - mean - std::lgamma(j + 1.0));
    }
    return std::min(sum, 1.0);
}

ClassificationError classification_error(const SpeciesDetector &det, int threshold) {
    return {poisson_cdf(threshold, det.bright_mean), 1 - poisson_cdf(threshold, det.dark_mean)};
}

int optimal_threshold(const SpeciesDetector &det) {
    // classify() calls this per shot, so remember the last answer on each thread.
    thread_local SpeciesDetector last{-1, -1, 0, -1};
    thread_local int last_best = 0;
    if (det.bright_mean == last.bright_mean && det.dark_mean == last.dark_mean) return last_best;
    det.validate();
    int limit = static_cast<int>(std::ceil(det.bright_mean + 10 * std::sqrt(det.bright_mean) + 10));
    // Running Poisson CDFs; the mean-zero case has all mass at 0.
    auto term = [](int j, double mean) {
        return mean == 0 ? (j == 0 ? 1.0 : 0.0) : std::exp(j * std::log(mean) - mean - std::lgamma(j + 1.0));
    };
    double cdf_bright = 0, cdf_dark = 0;
    int best = 0;
    double best_err = 2;
    for (int t = 0; t <= limit; ++t) {
        cdf_bright = std::min(cdf_bright + term(t, det.bright_mean), 1.0);
        cdf_dark = std::min(cdf_dark + term(t, det.dark_mean), 1.0);
        double err = cdf_bright + (1 - cdf_dark);
        if (err < best_err) {
            best_err = err;
            best = t;
        }
    }
    last = det;
    last_best = best;
    return best;
}

int project_spins(Eigen::VectorXcd &psi, const RegisterShape &shape, double u) {
    std::array<double, 4> p;
    double total = 0;
    for (int s = 0; s < 4; ++s) {
        p[s] = psi.segment(shape.index(s, 0), shape.fock_dim()).squaredNorm();
        total += p[s];
    }
    double target = u * total, acc = 0;
    int outcome = 3;
    for (int s = 0; s < 4; ++s) {
        acc += p[s];
        if (target < acc && p[s] > 0) {
            outcome = s;
            break;
        }
    }
    while (p[outcome] == 0 && outcome > 0) --outcome;
    for (int s = 0; s < 4; ++s) {
        if (s != outcome) psi.segment(shape.index(s, 0), shape.fock_dim()).setZero();
    }
    psi.normalize();
    return outcome;
}

std::pair<int, QuantumState> project_spins(const QuantumState &state, Rng &rng) {
    Eigen::VectorXcd psi = state.amplitudes();
    int outcome = project_spins(psi, state.shape(), uniform01(rng));
    return {outcome, QuantumState(state.shape(), psi)};
}

std::array<int, 2> photon_counts(int outcome, const DetectorModel &det, Rng &rng) {
    std::array<int, 2> counts{0, 0};
    for (Species s : kAllSpecies) {
        bool bright = level_of(outcome, s) == Level::Up;
        double mean = bright ? det[s].bright_mean : det[s].dark_mean;
        if (mean > 0) {
            std::poisson_distribution<int> d(mean);
            counts[idx(s)] = d(rng);
        }
    }
    return counts;
}

int classify(const std::array<int, 2> &counts, const DetectorModel &det) {
    Level be = counts[0] > det.threshold(Species::Be) ? Level::Up : Level::Down;
    Level mg = counts[1] > det.threshold(Species::Mg) ? Level::Up : Level::Down;
    return spin_index(be, mg);
}

SinusoidFit fit_sinusoid(const std::vector<CurvePoint> &curve, int k) {
    const int m = static_cast<int>(curve.size());
    if (m < 4) throw ConfigError("fit_sinusoid: need at least 4 points");
    bool weighted = std::all_of(curve.begin(), curve.end(), [](const CurvePoint &p) { return p.stderr_ > 0; });
    Eigen::MatrixXd x(m, 3);
    Eigen::VectorXd y(m), w(m);
    for (int i = 0; i < m; ++i) {
        x(i, 0) = std::cos(k * curve[i].x);
        x(i, 1) = std::sin(k * curve[i].x);
        x(i, 2) = 1;
        y(i) = curve[i].y;
        w(i) = weighted ? 1 / curve[i].stderr_ : 1;
    }
    Eigen::MatrixXd xw = w.asDiagonal() * x;
    Eigen::VectorXd yw = w.asDiagonal() * y;
    SinusoidFit fit;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xw);
    if (qr.rank() < 3) {
        fit.degenerate = true;
        fit.offset = y.mean();
        fit.residual = std::sqrt((y.array() - fit.offset).square().mean());
        return fit;
    }
    Eigen::Vector3d c = qr.solve(yw);
    Eigen::VectorXd r = y - x * c;
    fit.residual = std::sqrt(r.squaredNorm() / m);
    double a = c(0), b = -c(1);
    fit.amplitude = std::hypot(a, b);
    fit.phase = fit.amplitude > 0 ? std::atan2(b, a) : 0.0;
    if (fit.phase <= -kPi) fit.phase += 2 * kPi;
    fit.offset = c(2);
    Eigen::Matrix3d cov = (xw.transpose() * xw).inverse();
    if (!weighted) cov *= m > 3 ? r.squaredNorm() / (m - 3) : 0.0;
    if (fit.amplitude > 1e-12) {
        double var = (a * a * cov(0, 0) + b * b * cov(1, 1) - 2 * a * b * cov(0, 1)) / (fit.amplitude * fit.amplitude);
        fit.amplitude_stderr = std::sqrt(std::max(var, 0.0));
    } else {
        fit.degenerate = true;
        fit.amplitude = 0;
        fit.amplitude_stderr = std::sqrt(std::max(cov(0, 0), 0.0));
    }
    return fit;
}

Populations populations(const std::vector<ShotRecord> &records) {
    Populations p;
    p.shots = static_cast<long>(records.size());
    if (p.shots == 0) return p;
    std::array<long, 4> n{0, 0, 0, 0};
    for (const ShotRecord &r : records) ++n[r.outcome];
    for (int s = 0; s < 4; ++s) {
        p.p[s] = double(n[s]) / p.shots;
        p.stderr_[s] = std::sqrt(p.p[s] * (1 - p.p[s]) / p.shots);
    }
    return p;
}

std::pair<double, double> parity(const std::vector<ShotRecord> &records) {
    if (records.empty()) return {0, 0};
    double sum = 0;
    for (const ShotRecord &r : records) {
        sum += (r.outcome == 0 || r.outcome == 3) ? 1 : -1;
    }
    double mean = sum / records.size();
    return {mean, std::sqrt(std::max(1 - mean * mean, 0.0) / records.size())};
}

std::pair<double, double> correlation(const std::vector<ShotRecord> &records) { return parity(records); }

BellEstimate bell_fidelity(const std::array<double, 4> &pops, double contrast, double pops_stderr,
                           double contrast_stderr) {
    for (double p : pops) {
        if (!(p >= -1e-12 && p <= 1 + 1e-12)) throw ConfigError("bell_fidelity: population outside [0, 1]");
    }
    if (!(contrast >= 0)) throw ConfigError("bell_fidelity: contrast must be non-negative");
    if (contrast > 1 + 3 * contrast_stderr + 1e-12) {
        throw DataInconsistency("bell_fidelity: parity contrast " + std::to_string(contrast) +
                                " exceeds 1 by more than 3 standard errors");
    }
    BellEstimate b;
    b.populations = pops;
    b.contrast = contrast;
    b.fidelity = std::clamp((pops[0] + pops[3]) / 2 + contrast / 2, 0.0, 1.0);
    b.fidelity_stderr = std::hypot(pops_stderr / 2, contrast_stderr / 2);
    return b;
}

void CHSHSettings::validate() const {
    auto same = [](double a, double b) { return std::abs(std::remainder(a - b, 2 * kPi)) < 1e-12; };
    if (same(be[0], be[1]) || same(mg[0], mg[1])) {
        throw ConfigError("CHSH settings must be distinct");
    }
}

double chsh_combine(const std::array<double, 4> &e) { return std::abs(e[0] - e[1]) + std::abs(e[2] + e[3]); }

}  // namespace mixedion
