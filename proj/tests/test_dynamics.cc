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

#include <cmath>
#include <iostream>
#include <random>

#include "mixedion/dynamics.h"
#include "mixedion/errors.h"
#include "mixedion/fockspace.h"
#include "oracles.h"

using namespace mixedion;

namespace {

MSDriveParams random_ld_drive(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> ratio(0.1, 0.5), phase(0, kTwoPi);
    MSDriveParams d;
    d.delta = kTwoPi / 35e-6;
    d.duration = 35e-6;
    d.rabi = {ratio(rng) * d.delta, ratio(rng) * d.delta};
    for (Species s : kAllSpecies) d.ledger.set_sideband_phases(s, phase(rng), phase(rng));
    return d;
}

oracle::LDDrive to_oracle(const MSDriveParams &d) {
    oracle::LDDrive o{};
    for (Species s : kAllSpecies) {
        int j = idx(s);
        o.omega[j] = d.rabi[j];
        o.phi_r[j] = d.ledger.effective_phi_r(s);
        o.phi_b[j] = d.ledger.effective_phi_b(s);
    }
    o.delta = d.delta;
    return o;
}

std::array<SpeciesParams, 2> species() { return {default_beryllium(), default_magnesium()}; }

// Test-side σ_φ eigenvectors: σ_φ = e^{iφ}σ† + e^{−iφ}σ.
Eigen::Vector2cd branch_vector(double phi_s, int s) {
    Eigen::Vector2cd v(1.0, double(s) * std::exp(cplx(0, -phi_s)));
    return v / std::sqrt(2.0);
}

Eigen::Vector4cd branch_state(const MSDriveParams &d, int s_be, int s_mg) {
    Eigen::Vector2cd b = branch_vector(d.ledger.effective_phi_s(Species::Be), s_be);
    Eigen::Vector2cd m = branch_vector(d.ledger.effective_phi_s(Species::Mg), s_mg);
    Eigen::Vector4cd v;
    v << b(0) * m(0), b(0) * m(1), b(1) * m(0), b(1) * m(1);
    return v;
}

QuantumState run_rk4(const MSDriveParams &d, const QuantumState &in, double t) {
    auto parts = ms_hamiltonian_parts(d, species(), in.shape());
    return propagate(in, TimeDependentHamiltonian::from_ms(parts), t, ms_step_policy(d.delta));
}

}  // namespace

TEST(SidebandCoupling, LambDickeLimitAndLaguerreValues) {
    for (int n = 0; n < 8; ++n) {
        double ratio = sideband_coupling(n, 1, 1e-5, 1.0) / (1e-5 * std::sqrt(n + 1.0));
        EXPECT_NEAR(ratio, 1.0, 1e-8);
        EXPECT_NEAR(sideband_coupling(n, 1, 0.156, 1.0), oracle::exact_sideband(n, 0.156, 1.0), 1e-13);
        EXPECT_NEAR(sideband_coupling(n, 1, 0.156, 2.0, CouplingModel::LambDicke), 2 * 0.156 * std::sqrt(n + 1.0),
                    1e-13);
    }
    EXPECT_NEAR(sideband_coupling(0, 1, 0.156, 1.0), 0.156 * std::exp(-0.156 * 0.156 / 2), 1e-14);
    EXPECT_NEAR(sideband_coupling(0, 1, 0.156, 1.0), 0.15411, 5e-6);
    // Removal from n is the same matrix element as adding to n − 1.
    EXPECT_DOUBLE_EQ(sideband_coupling(3, -1, 0.265, 1.0), sideband_coupling(2, 1, 0.265, 1.0));
}

TEST(SidebandCoupling, ExactModelDepartsFromSqrtScaling) {
    double r = sideband_coupling(4, 1, 0.265, 1.0) / sideband_coupling(0, 1, 0.265, 1.0);
    EXPECT_GT(std::abs(r / std::sqrt(5.0) - 1), 0.01);
    EXPECT_THROW(sideband_coupling(-1, 1, 0.2, 1.0), ConfigError);
    EXPECT_THROW(sideband_coupling(0, -1, 0.2, 1.0), ConfigError);
}

TEST(CarrierUnitary, MatchesPauliRotation) {
    for (double theta : {0.0, 0.3, kPi / 2, kPi, 5.0}) {
        for (double phi : {0.0, 0.7, kPi / 2, 4.0}) {
            EXPECT_LT((carrier_unitary(theta, phi) - oracle::rotation(theta, phi)).norm(), 1e-14);
        }
    }
    EXPECT_LT((carrier_unitary(0, 1.2) - Eigen::Matrix2cd::Identity()).norm(), 1e-15);
    EXPECT_LT((carrier_unitary(kTwoPi, 0) + Eigen::Matrix2cd::Identity()).norm(), 1e-14);
    Eigen::Vector2cd down = carrier_unitary(kPi, 0) * Eigen::Vector2cd(1, 0);
    EXPECT_NEAR(std::norm(down(1)), 1.0, 1e-15);
}

TEST(CarrierUnitary, CompositeTransfersPopulationLikePiPulse) {
    Eigen::Matrix2cd c = carrier_unitary(kPi / 2, 0) * carrier_unitary(3 * kPi / 2, kPi / 2) *
                         carrier_unitary(kPi / 2, 0);
    Eigen::Matrix2cd pi = carrier_unitary(kPi, 0);
    // Same populations from any input; the residual is a Z rotation.
    EXPECT_LT((c.cwiseAbs() - pi.cwiseAbs()).norm(), 1e-14);
    Eigen::Matrix2cd z = c * pi.adjoint();
    EXPECT_NEAR(std::abs(z(0, 1)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(z(0, 0)), 1.0, 1e-14);
}

TEST(CarrierHamiltonian, EvolutionMatchesUnitary) {
    double omega = kTwoPi * 50e3;
    for (double phi : {0.0, 1.1, 3.0}) {
        auto u = evolve_two_level(carrier_hamiltonian(omega, phi), 1.3 / omega);
        EXPECT_LT((u - carrier_unitary(1.3, phi)).norm(), 1e-12);
    }
}

TEST(MSHamiltonian, ZeroDriveGivesZero) {
    MSDriveParams d = gate_condition_drive(35e-6);
    d.rabi = {0, 0};
    auto h = ms_hamiltonian(d, species(), RegisterShape(5), 1e-6);
    EXPECT_EQ(h.norm(), 0.0);
}

TEST(MSHamiltonian, MatchesTermByTermExpansion) {
    std::mt19937_64 rng(7);
    RegisterShape shape(6);
    oracle::Register reg{6};
    for (int k = 0; k < 5; ++k) {
        MSDriveParams d = random_ld_drive(rng);
        for (double t : {0.0, 3e-6, 17e-6}) {
            auto h = ms_hamiltonian(d, species(), shape, t);
            auto ho = oracle::ms_hamiltonian(to_oracle(d), reg, t);
            // Only the truncation edge differs (the oracle keeps a|n_max+1⟩ = 0 as well).
            EXPECT_LT((h - ho).cwiseAbs().maxCoeff(), 1e-6 * d.delta);
            EXPECT_LT((h - h.adjoint()).norm(), 1e-12 * d.delta);
        }
    }
}

TEST(MSHamiltonian, LadderMatrixElementPhases) {
    MSDriveParams d = gate_condition_drive(35e-6);
    d.ledger.set_sideband_phases(Species::Be, 0.4, 1.3);
    RegisterShape shape(6);
    auto h = ms_hamiltonian(d, species(), shape, 0.0);
    const double om = d.rabi[0];
    int up = spin_index(Level::Up, Level::Up), down = spin_index(Level::Down, Level::Up);
    for (int n = 0; n < 5; ++n) {
        // ⟨↓,n+1|H|↑,n⟩ comes from the h.c. of σ†a e^{iφ_r}: Ω e^{−iφ_r}√(n+1).
        cplx e1 = h(shape.index(down, n + 1), shape.index(up, n));
        EXPECT_NEAR(std::abs(e1 - om * std::exp(cplx(0, -0.4)) * std::sqrt(n + 1.0)), 0.0, 1e-9 * om);
        // ⟨↓,n|H|↑,n+1⟩ comes from the h.c. of σ†a† e^{iφ_b}: Ω e^{−iφ_b}√(n+1).
        cplx e2 = h(shape.index(down, n), shape.index(up, n + 1));
        EXPECT_NEAR(std::abs(e2 - om * std::exp(cplx(0, -1.3)) * std::sqrt(n + 1.0)), 0.0, 1e-9 * om);
    }
}

TEST(MSHamiltonian, ExactModelScalesLadderByGroundStateRatio) {
    MSDriveParams d = gate_condition_drive(35e-6, CouplingModel::ExactLaguerre);
    RegisterShape shape(8);
    auto h = ms_hamiltonian(d, species(), shape, 0.0);
    int up = spin_index(Level::Up, Level::Up), down = spin_index(Level::Up, Level::Down);
    const double eta = default_magnesium().eta;
    for (int n = 0; n < 7; ++n) {
        double expect = d.rabi[1] * oracle::exact_sideband(n, eta, 1) / oracle::exact_sideband(0, eta, 1);
        EXPECT_NEAR(std::abs(h(shape.index(down, n + 1), shape.index(up, n))), expect, 1e-9 * d.rabi[1]);
    }
}

TEST(Propagate, ZeroHamiltonianIsIdentity) {
    RegisterShape shape(3);
    auto in = QuantumState::product(SpinVector::Constant(0.5), 1, shape);
    auto zero = [&](double) { return Eigen::MatrixXcd::Zero(shape.dim(), shape.dim()).eval(); };
    auto out = propagate(in, zero, 1e-5, StepPolicy{});
    EXPECT_LT((out.amplitudes() - in.amplitudes()).norm(), 1e-15);
}

TEST(Propagate, CarrierDriveMatchesClosedForm) {
    RegisterShape shape(1);
    const double omega = kTwoPi * 50e3, phi = 0.9, theta = 2.2;
    Eigen::Matrix2cd hq = carrier_hamiltonian(omega, phi);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(shape.dim(), shape.dim());
    // Drive Be only: spins (↑↑,↑↓,↓↑,↓↓) pair as (0,2) and (1,3).
    for (int mg = 0; mg < 2; ++mg)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int n = 0; n < 2; ++n) h(shape.index(2 * a + mg, n), shape.index(2 * b + mg, n)) = hq(a, b);
    auto in = compose_state(Level::Up, Level::Up, 0, shape);
    StepPolicy policy;
    policy.tol = 1e-12;
    auto out = propagate(in, [&](double) { return h; }, theta / omega, policy);
    Eigen::Matrix2cd u = carrier_unitary(theta, phi);
    EXPECT_NEAR(std::abs(out.amplitude(0, 0) - u(0, 0)), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(out.amplitude(2, 0) - u(1, 0)), 0.0, 1e-8);
}

TEST(Propagate, OracleEquivalenceOnRandomDrives) {
    std::mt19937_64 rng(2026);
    RegisterShape shape(14);
    oracle::Register reg{14};
    for (int k = 0; k < 10; ++k) {
        MSDriveParams d = random_ld_drive(rng);
        auto in = compose_state(Level::Up, Level::Up, 0, shape);
        auto rk = run_rk4(d, in, d.duration);
        auto an = ms_analytic(d, d.duration, in);
        EXPECT_GE(fidelity(rk, an), 1 - 1e-8);
        EXPECT_NEAR(rk.amplitudes().norm(), 1.0, 1e-9);
        Eigen::VectorXcd mag = oracle::ms_propagator(to_oracle(d), reg, d.duration) * in.amplitudes();
        EXPECT_GE(std::norm(mag.dot(an.amplitudes())), 1 - 1e-8);
    }
}

TEST(Propagate, StepHalvingConverged) {
    MSDriveParams d = gate_condition_drive(35e-6);
    RegisterShape shape(12);
    auto in = compose_state(Level::Up, Level::Up, 0, shape);
    auto parts = ms_hamiltonian_parts(d, species(), shape);
    auto h = TimeDependentHamiltonian::from_ms(parts);
    StepPolicy p = ms_step_policy(d.delta);
    auto r = propagate_vector(in.amplitudes(), h, d.duration, p);
    StepPolicy finer = p;
    finer.max_step = d.duration / (2.0 * r.steps);
    auto r2 = propagate_vector(in.amplitudes(), h, d.duration, finer);
    double f = std::norm(r.psi.dot(r2.psi));
    EXPECT_LT(1 - f, 1e-9);
}

TEST(Propagate, ThrowsWhenStepBudgetExhausted) {
    MSDriveParams d = gate_condition_drive(35e-6);
    RegisterShape shape(8);
    auto h = TimeDependentHamiltonian::from_ms(ms_hamiltonian_parts(d, species(), shape));
    StepPolicy p;
    p.min_steps = 2;
    p.max_steps = 4;
    p.tol = 1e-14;
    EXPECT_THROW(propagate_vector(compose_state(Level::Up, Level::Up, 0, shape).amplitudes(), h, d.duration, p),
                 ConvergenceError);
}

TEST(GeometricPhase, ExamplesAndSumRule) {
    const double delta = 2.0;
    auto [same, opp] = geometric_phase(delta / 4, delta, 0.0);
    EXPECT_NEAR(same, kPi / 2, 1e-15);
    EXPECT_NEAR(opp, 0.0, 1e-15);
    auto [s2, o2] = geometric_phase(0.7, delta, kPi);
    double total = 8 * kPi * 0.49 / 4;
    EXPECT_NEAR(s2, 0.0, 1e-15);
    EXPECT_NEAR(o2, total, 1e-14);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, kTwoPi);
    for (int k = 0; k < 20; ++k) {
        auto [a, b] = geometric_phase(0.3, 1.1, u(rng));
        EXPECT_NEAR(a + b, 8 * kPi * 0.09 / 1.21, 1e-13);
    }
}

TEST(MSAnalytic, ClosedLoopAndGateCondition) {
    MSDriveParams d = gate_condition_drive(35e-6);
    for (int sb : {1, -1}) {
        for (int sm : {1, -1}) {
            EXPECT_LT(std::abs(ms_branch(d, sb, sm, d.duration).alpha), 1e-12 * std::abs(d.rabi[0] / d.delta) + 1e-15);
        }
    }
    EXPECT_NEAR(ms_branch(d, 1, 1, d.duration).phase - ms_branch(d, 1, -1, d.duration).phase, kPi / 2, 1e-12);
    RegisterShape shape(10);
    auto out = ms_analytic(d, d.duration, compose_state(Level::Up, Level::Up, 0, shape));
    EXPECT_NEAR(bell_fidelity_local_frame(reduced_qubit_density(out)), 1.0, 1e-12);
    MSDriveParams exact = gate_condition_drive(35e-6, CouplingModel::ExactLaguerre);
    EXPECT_THROW(ms_analytic(exact, exact.duration, compose_state(Level::Up, Level::Up, 0, shape)), ConfigError);
}

TEST(MSDynamics, BranchPhasesReproduceGeometricPhase) {
    RegisterShape shape(16);
    for (int k = 0; k <= 8; ++k) {
        double dphi = kPi * k / 8;
        MSDriveParams d = gate_condition_drive(35e-6);
        d.rabi = {0.3 * d.delta, 0.3 * d.delta};
        // φ_M = (φ_r − φ_b)/2: Be gets +Δφ_M/2 and Mg −Δφ_M/2, with every
        // stored phase inside [0, π] so no 2π wrap shifts φ_M by π.
        d.ledger.set_sideband_phases(Species::Be, dphi, 0.0);
        d.ledger.set_sideband_phases(Species::Mg, 0.0, dphi);
        std::array<double, 4> phase{};
        int b = 0;
        for (int sb : {1, -1}) {
            for (int sm : {1, -1}) {
                auto in = QuantumState::product(branch_state(d, sb, sm), 0, shape);
                auto out = run_rk4(d, in, d.duration);
                phase[b++] = std::arg(in.amplitudes().dot(out.amplitudes()));
            }
        }
        auto [same, opp] = geometric_phase(d.rabi[0], d.delta, dphi);
        double scale = 8 * kPi * d.rabi[0] * d.rabi[0] / (d.delta * d.delta);
        auto wrapped = [](double x) { return std::remainder(x, kTwoPi); };
        EXPECT_LT(std::abs(wrapped(phase[0] - same)) / scale, 1e-6) << dphi;
        EXPECT_LT(std::abs(wrapped(phase[3] - same)) / scale, 1e-6) << dphi;
        EXPECT_LT(std::abs(wrapped(phase[1] - opp)) / scale, 1e-6) << dphi;
        EXPECT_LT(std::abs(wrapped(phase[2] - opp)) / scale, 1e-6) << dphi;
    }
}

TEST(MSDynamics, FockIndependenceInLambDickeModel) {
    MSDriveParams d = gate_condition_drive(35e-6);
    RegisterShape shape(24);
    SpinMatrix ref;
    for (int n = 0; n <= 5; ++n) {
        SpinMatrix rho = reduced_qubit_density(run_rk4(d, compose_state(Level::Up, Level::Up, n, shape), d.duration));
        if (n == 0) {
            ref = rho;
        } else {
            EXPECT_LT(trace_distance(rho, ref), 1e-6) << n;
        }
    }
}

TEST(MSDynamics, ExactModelLeavesResidualDisplacement) {
    MSDriveParams ld = gate_condition_drive(35e-6);
    MSDriveParams ex = gate_condition_drive(35e-6, CouplingModel::ExactLaguerre);
    RegisterShape shape(30);
    auto in4 = compose_state(Level::Up, Level::Up, 4, shape);
    EXPECT_NEAR(run_rk4(ld, in4, ld.duration).fock_population(4), 1.0, 1e-8);
    auto out4 = run_rk4(ex, in4, ex.duration);
    EXPECT_LT(out4.fock_population(4), 1 - 1e-4);
    auto out0 = run_rk4(ex, compose_state(Level::Up, Level::Up, 0, shape), ex.duration);
    double f0 = bell_fidelity_local_frame(reduced_qubit_density(out0));
    double f4 = bell_fidelity_local_frame(reduced_qubit_density(out4));
    EXPECT_LT(f4, f0);
}

TEST(Spectator, DisabledIsZeroAndShiftAccumulatesPhase) {
    MSDriveParams d = gate_condition_drive(35e-6);
    d.spectator = {1e3, 2e3};
    EXPECT_EQ(spectator_shift(d, Species::Be), 0.0);
    d.spectator_enabled = true;
    EXPECT_EQ(spectator_shift(d, Species::Mg), 2e3);
    d.rabi = {0, 0};
    RegisterShape shape(2);
    auto in = QuantumState::product(SpinVector::Constant(0.5), 0, shape);
    MSEvolver ev(d, species(), shape);
    Eigen::VectorXcd psi = in.amplitudes();
    ev.evolve(psi, 0, d.duration, {0, 0});
    // |↑⟩ levels pick up e^{−i s t}; ↓↓ is untouched.
    cplx r_uu = psi(shape.index(0, 0)) / psi(shape.index(3, 0));
    cplx r_du = psi(shape.index(2, 0)) / psi(shape.index(3, 0));
    EXPECT_NEAR(std::abs(std::remainder(std::arg(r_uu) + 3e3 * d.duration, kTwoPi)), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(std::remainder(std::arg(r_du) + 2e3 * d.duration, kTwoPi)), 0.0, 1e-10);
}

TEST(Spectator, SmallShiftCostsLittleBellFidelity) {
    MSDriveParams d = gate_condition_drive(35e-6);
    RegisterShape shape(12);
    auto in = compose_state(Level::Up, Level::Up, 0, shape);
    double f0 = bell_fidelity_local_frame(reduced_qubit_density(run_rk4(d, in, d.duration)));
    d.spectator_enabled = true;
    d.spectator = {1e-3 * d.delta, 1e-3 * d.delta};
    double f1 = bell_fidelity_local_frame(reduced_qubit_density(run_rk4(d, in, d.duration)));
    EXPECT_GT(f0 - f1, 1e-6);
    EXPECT_LT(f0 - f1, 1e-4);
}

TEST(MSEvolver, AgreesWithIntegratorIncludingShiftsAndOffsets) {
    for (CouplingModel model : {CouplingModel::LambDicke, CouplingModel::ExactLaguerre}) {
        std::mt19937_64 rng(99);
        MSDriveParams d = random_ld_drive(rng);
        d.model = model;
        d.stark_shift = {0.02 * d.delta, -0.03 * d.delta};
        d.stark_compensation = {0.01 * d.delta, 0.0};
        RegisterShape shape(20);
        SpinVector spins;
        spins << 0.5, cplx(0, 0.5), -0.5, 0.5;
        auto in = QuantumState::product(spins, 2, shape);
        std::array<double, 2> optical{0.7, 2.1};
        MSDriveParams shifted = d;
        shifted.ledger.set_path_offset(Species::Be, optical[0]);
        shifted.ledger.set_path_offset(Species::Mg, optical[1]);
        auto rk = run_rk4(shifted, in, d.duration);
        MSEvolver ev(d, species(), shape);
        Eigen::VectorXcd psi = in.amplitudes();
        ev.evolve(psi, 0, 0.4 * d.duration, optical);
        ev.evolve(psi, 0.4 * d.duration, d.duration, optical);
        EXPECT_GE(std::norm(psi.dot(rk.amplitudes())), 1 - 1e-9) << model_name(model);
        EXPECT_NEAR(psi.norm(), 1.0, 1e-10);
    }
}

TEST(Sideband, RedPiPulseFromGroundStateIsComplete) {
    for (CouplingModel model : {CouplingModel::LambDicke, CouplingModel::ExactLaguerre}) {
        RegisterShape shape(6);
        const double omega0 = kTwoPi * 500e3, eta = 0.156;
        Eigen::VectorXcd psi = compose_state(Level::Up, Level::Up, 0, shape).amplitudes();
        double t = sideband_duration(kPi, omega0, eta, model);
        apply_sideband(psi, shape, Species::Be, SidebandBranch::Red, 0.0, omega0, eta, model, t);
        EXPECT_NEAR(std::norm(psi(shape.index(Level::Down, Level::Up, 1))), 1.0, 1e-12);
    }
}

TEST(Sideband, ThermalLevelsRotateAtTheirOwnRate) {
    RegisterShape shape(8);
    const double omega0 = kTwoPi * 500e3, eta = 0.265;
    double t = sideband_duration(kPi, omega0, eta, CouplingModel::ExactLaguerre);
    for (int n = 0; n < 6; ++n) {
        Eigen::VectorXcd psi = compose_state(Level::Up, Level::Up, n, shape).amplitudes();
        apply_sideband(psi, shape, Species::Mg, SidebandBranch::Red, 0.3, omega0, eta, CouplingModel::ExactLaguerre, t);
        double g = oracle::exact_sideband(n, eta, omega0);
        double expect = std::pow(std::sin(g * t / 2), 2);
        EXPECT_NEAR(std::norm(psi(shape.index(Level::Up, Level::Down, n + 1))), expect, 1e-12) << n;
    }
}

TEST(SingleQubit, ZPhaseAndRotationActOnOneSpecies) {
    RegisterShape shape(1);
    Eigen::VectorXcd psi = compose_state(Level::Up, Level::Up, 0, shape).amplitudes();
    apply_single_qubit(psi, shape, Species::Mg, carrier_unitary(kPi, 0));
    EXPECT_NEAR(std::norm(psi(shape.index(Level::Up, Level::Down, 0))), 1.0, 1e-15);
    apply_z_phase(psi, shape, Species::Mg, 0.8);
    EXPECT_NEAR(std::arg(psi(shape.index(Level::Up, Level::Down, 0)) / cplx(0, -1)), 0.4, 1e-14);
}
