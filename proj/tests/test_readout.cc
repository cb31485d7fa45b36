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
#include <gtest/gtest.h>

#include <boost/math/distributions/poisson.hpp>
#include <algorithm>
#include <cmath>
#include <random>

#include "mixedion/errors.h"
#include "mixedion/readout.h"
#include "mixedion/rng.h"
#include "oracles.h"

using namespace mixedion;

namespace {

double normal01(Rng &rng) { return std::normal_distribution<double>()(rng); }

double boost_cdf(int k, double mean) {
    if (mean == 0) return 1.0;
    return boost::math::cdf(boost::math::poisson_distribution<double>(mean), k);
}

// Exhaustive scan oracle for the threshold minimizing the summed error.
int scan_threshold(double bright, double dark) {
    int best = 0;
    double best_err = 3;
    for (int t = 0; t <= 60; ++t) {
        double err = boost_cdf(t, bright) + (1 - boost_cdf(t, dark));
        if (err < best_err) {
            best_err = err;
            best = t;
        }
    }
    return best;
}

std::vector<CurvePoint> cos_curve(int m, int k, double amp, double phase, double offset) {
    std::vector<CurvePoint> c;
    for (int i = 0; i < m; ++i) {
        double x = 2 * kPi * i / m;
        c.push_back({x, amp * std::cos(k * x + phase) + offset, 0});
    }
    return c;
}

}  // namespace

TEST(Detector, Validation) {
    DetectorModel d;
    EXPECT_NO_THROW(d.validate());
    d[Species::Mg].dark_mean = 40;
    EXPECT_THROW(d.validate(), ConfigError);
    d = DetectorModel();
    d[Species::Be].dark_mean = -1;
    EXPECT_THROW(d.validate(), ConfigError);
    d = DetectorModel();
    d[Species::Be].threshold = -2;
    EXPECT_THROW(d.validate(), ConfigError);
}

TEST(Detector, PoissonCdfMatchesBoost) {
    for (double mean : {0.5, 3.5, 30.0}) {
        for (int k : {0, 1, 5, 12, 29, 45}) {
            EXPECT_NEAR(poisson_cdf(k, mean), boost_cdf(k, mean), 1e-13) << mean << " " << k;
        }
    }
    EXPECT_EQ(poisson_cdf(0, 0.0), 1.0);
}

TEST(Detector, OptimalThresholdMatchesExhaustiveScan) {
    SpeciesDetector det;
    EXPECT_EQ(optimal_threshold(det), scan_threshold(30, 3.5));
    det.dark_mean = 0;
    EXPECT_EQ(optimal_threshold(det), 0);
    for (double bright : {12.0, 20.0, 45.0}) {
        SpeciesDetector d{bright, 2.0, 1e-4, -1};
        EXPECT_EQ(optimal_threshold(d), scan_threshold(bright, 2.0));
    }
}

TEST(Detector, SwappedMeansGiveComplementaryErrorUnchanged) {
    // Exchanging the means turns the rule into "count ≤ t means the low-mean state";
    // its error P(N > t | 3.5) + P(N ≤ t | 30) is scanned separately.
    double forward = 3, reverse = 3;
    for (int t = 0; t <= 60; ++t) {
        forward = std::min(forward, boost_cdf(t, 30) + 1 - boost_cdf(t, 3.5));
        reverse = std::min(reverse, (1 - boost_cdf(t, 3.5)) + boost_cdf(t, 30));
    }
    SpeciesDetector det;
    int t = optimal_threshold(det);
    auto e = classification_error(det, t);
    EXPECT_NEAR(e.bright_as_dark + e.dark_as_bright, forward, 1e-15);
    EXPECT_NEAR(forward, reverse, 1e-15);
}

TEST(Detector, DefaultClassificationErrorIsSmall) {
    DetectorModel d;
    for (Species s : kAllSpecies) {
        int t = d.threshold(s);
        double analytic = (boost_cdf(t, 30) + 1 - boost_cdf(t, 3.5)) / 2;
        auto e = classification_error(d[s], t);
        EXPECT_NEAR(e.mean(), analytic, 1e-14);
        EXPECT_LT(e.bright_as_dark, 2e-3);
        EXPECT_LT(e.dark_as_bright, 2e-3);
    }
}

TEST(Project, DeterministicProductState) {
    RegisterShape shape(4);
    auto s = compose_state(Level::Up, Level::Down, 3, shape);
    Rng rng(3);
    for (int k = 0; k < 100; ++k) {
        auto [outcome, post] = project_spins(s, rng);
        EXPECT_EQ(outcome, spin_index(Level::Up, Level::Down));
        EXPECT_NEAR(post.fock_population(3), 1.0, 1e-14);
    }
}

TEST(Project, BellStateNeverGivesOddOutcomes) {
    RegisterShape shape(1);
    auto bell = QuantumState::product(oracle::phi_plus(), 0, shape);
    Rng rng(11);
    std::array<long, 4> n{};
    const int shots = 10000;
    for (int k = 0; k < shots; ++k) ++n[project_spins(bell, rng).first];
    EXPECT_EQ(n[1], 0);
    EXPECT_EQ(n[2], 0);
    EXPECT_NEAR(double(n[0]) / shots, 0.5, 3 * 0.5 / std::sqrt(shots));
}

TEST(Project, FrequenciesMatchPopulations) {
    RegisterShape shape(2);
    Rng gen(5);
    Eigen::VectorXcd psi(shape.dim());
    for (int i = 0; i < psi.size(); ++i) psi(i) = cplx(normal01(gen), normal01(gen));
    QuantumState s(shape, psi.normalized());
    auto pops = qubit_populations(s);
    const int shots = 100000;
    std::array<long, 4> n{};
    Rng rng(6);
    for (int k = 0; k < shots; ++k) {
        auto [outcome, post] = project_spins(s, rng);
        ++n[outcome];
        EXPECT_NEAR(qubit_populations(post)[outcome], 1.0, 1e-12);
    }
    for (int q = 0; q < 4; ++q) {
        double sigma = std::sqrt(pops[q] * (1 - pops[q]) / shots);
        EXPECT_NEAR(double(n[q]) / shots, pops[q], 3 * sigma + 1e-12);
    }
}

TEST(PhotonCounts, DarkWithZeroBackgroundIsAlwaysZero) {
    DetectorModel d;
    d[Species::Be].dark_mean = 0;
    d[Species::Mg].dark_mean = 0;
    Rng rng(1);
    for (int k = 0; k < 1000; ++k) {
        auto c = photon_counts(spin_index(Level::Down, Level::Down), d, rng);
        EXPECT_EQ(c[0], 0);
        EXPECT_EQ(c[1], 0);
    }
}

TEST(PhotonCounts, BrightMeanMatchesPoisson) {
    DetectorModel d;
    Rng rng(2);
    const int n = 100000;
    double sum = 0;
    for (int k = 0; k < n; ++k) {
        auto c = photon_counts(spin_index(Level::Up, Level::Down), d, rng);
        EXPECT_GE(c[0], 0);
        EXPECT_GE(c[1], 0);
        sum += c[0];
    }
    EXPECT_NEAR(sum / n, 30.0, 3 * std::sqrt(30.0 / n));
}

TEST(PhotonCounts, ZeroSpamZeroBackgroundClassificationIsExact) {
    DetectorModel d;
    d[Species::Be].dark_mean = 0;
    d[Species::Mg].dark_mean = 0;
    Rng rng(9);
    for (int k = 0; k < 20000; ++k) {
        int outcome = k & 3;
        EXPECT_EQ(classify(photon_counts(outcome, d, rng), d), outcome);
    }
}

TEST(FitSinusoid, ExactSamples) {
    auto fit = fit_sinusoid(cos_curve(16, 2, 1.0, 0.3, 0.0), 2);
    EXPECT_NEAR(fit.amplitude, 1.0, 1e-12);
    EXPECT_NEAR(fit.phase, 0.3, 1e-12);
    EXPECT_LT(fit.residual, 1e-12);
    EXPECT_FALSE(fit.degenerate);
    // Negative amplitude is folded into the phase.
    auto neg = fit_sinusoid(cos_curve(12, 1, -0.4, 0.0, 0.5), 1);
    EXPECT_NEAR(neg.amplitude, 0.4, 1e-12);
    EXPECT_NEAR(std::abs(neg.phase), kPi, 1e-12);
    EXPECT_NEAR(neg.offset, 0.5, 1e-12);
}

TEST(FitSinusoid, ConstantDataIsFlagged) {
    auto fit = fit_sinusoid(cos_curve(16, 2, 0.0, 0.0, 0.7), 2);
    EXPECT_EQ(fit.amplitude, 0.0);
    EXPECT_TRUE(fit.degenerate);
    EXPECT_NEAR(fit.offset, 0.7, 1e-12);
    EXPECT_THROW(fit_sinusoid(cos_curve(3, 2, 1, 0, 0), 2), ConfigError);
}

TEST(FitSinusoid, NoisyDataWithinTolerance) {
    Rng rng(4);
    const int trials = 400;
    int within = 0;
    double bias = 0;
    for (int trial = 0; trial < trials; ++trial) {
        auto c = cos_curve(16, 2, 0.9, 1.1, 0.05);
        for (auto &p : c) p.y += 0.05 * normal01(rng);
        auto fit = fit_sinusoid(c, 2);
        if (trial == 0) EXPECT_NEAR(fit.amplitude, 0.9, 0.05);
        EXPECT_GT(fit.amplitude_stderr, 0.0);
        within += std::abs(fit.amplitude - 0.9) < 0.05;
        bias += (fit.amplitude - 0.9) / trials;
    }
    // Amplitude scatter is 0.05·sqrt(2/16), so 0.05 is about 2.8 sigma.
    EXPECT_GE(within, int(0.98 * trials));
    EXPECT_NEAR(bias, 0.0, 3 * 0.05 * std::sqrt(2.0 / 16) / std::sqrt(double(trials)));
}

TEST(Estimators, PopulationsAndParityFolds) {
    std::vector<ShotRecord> r(10);
    for (int i = 0; i < 10; ++i) r[i].outcome = i < 6 ? 0 : (i < 8 ? 3 : 1);
    auto p = populations(r);
    EXPECT_EQ(p.shots, 10);
    EXPECT_DOUBLE_EQ(p.p[0], 0.6);
    EXPECT_DOUBLE_EQ(p.p[3], 0.2);
    EXPECT_DOUBLE_EQ(p.p[1], 0.2);
    EXPECT_NEAR(p.stderr_[0], std::sqrt(0.6 * 0.4 / 10), 1e-15);
    auto [par, err] = parity(r);
    EXPECT_DOUBLE_EQ(par, 0.6);
    EXPECT_NEAR(err, std::sqrt((1 - 0.36) / 10), 1e-15);
    // Order independence of the folds.
    std::reverse(r.begin(), r.end());
    EXPECT_DOUBLE_EQ(parity(r).first, 0.6);
}

TEST(BellFidelity, Examples) {
    EXPECT_DOUBLE_EQ(bell_fidelity({0.5, 0, 0, 0.5}, 1.0).fidelity, 1.0);
    EXPECT_DOUBLE_EQ(bell_fidelity({0.5, 0, 0, 0.5}, 0.0).fidelity, 0.5);
    auto b = bell_fidelity({0.49, 0.01, 0.01, 0.49}, 0.96, 0.004, 0.01);
    EXPECT_NEAR(b.fidelity, 0.97, 1e-12);
    EXPECT_NEAR(b.fidelity_stderr, std::hypot(0.002, 0.005), 1e-12);
}

TEST(BellFidelity, MonotoneInContrastAndBounded) {
    std::array<double, 4> pops{0.45, 0.05, 0.04, 0.46};
    double prev = -1;
    for (double c = 0; c <= 1.0; c += 0.01) {
        double f = bell_fidelity(pops, c).fidelity;
        EXPECT_GE(f, prev);
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, 1.0);
        prev = f;
    }
}

TEST(BellFidelity, ImplausibleContrastIsDataInconsistency) {
    EXPECT_THROW(bell_fidelity({0.5, 0, 0, 0.5}, 1.2, 0, 0.01), DataInconsistency);
    EXPECT_NO_THROW(bell_fidelity({0.5, 0, 0, 0.5}, 1.02, 0, 0.01));
    EXPECT_THROW(bell_fidelity({1.5, 0, 0, 0.5}, 0.5), ConfigError);
}

TEST(CHSH, SettingsAndCombination) {
    CHSHSettings s;
    EXPECT_NO_THROW(s.validate());
    EXPECT_DOUBLE_EQ(s.be[1], kPi / 2);
    EXPECT_DOUBLE_EQ(s.mg[0], kPi / 4);
    s.mg[1] = s.mg[0] + 2 * kPi;
    EXPECT_THROW(s.validate(), ConfigError);
    double r = 1 / std::sqrt(2.0);
    EXPECT_NEAR(chsh_combine({r, -r, r, r}), 2 * std::sqrt(2.0), 1e-15);
    EXPECT_DOUBLE_EQ(chsh_combine({1, 1, 1, 1}), 2.0);
}
