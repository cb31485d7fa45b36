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

#include "mixedion/fockspace.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "mixedion/errors.h"

namespace mixedion {

const char *species_name(Species s) { return s == Species::Be ? "Be" : "Mg"; }

RegisterShape::RegisterShape(int n_max) : n_max_(n_max) {
    if (n_max < 1) {
        throw ConfigError("RegisterShape: n_max must be >= 1, got " + std::to_string(n_max));
    }
}

QuantumState::QuantumState(RegisterShape shape, Eigen::VectorXcd amplitudes)
    : shape_(shape), amps_(std::move(amplitudes)) {
    if (amps_.size() != shape_.dim()) {
        throw ShapeMismatch("QuantumState: amplitude vector has length " + std::to_string(amps_.size()) +
                            ", register needs " + std::to_string(shape_.dim()));
    }
    double norm2 = amps_.squaredNorm();
    if (std::abs(norm2 - 1.0) > 1e-9) {
        throw std::invalid_argument("QuantumState: squared norm " + std::to_string(norm2) + " is not 1");
    }
}

QuantumState QuantumState::normalized(RegisterShape shape, Eigen::VectorXcd amplitudes) {
    double norm = amplitudes.norm();
    if (norm == 0.0) {
        throw std::invalid_argument("QuantumState::normalized: zero vector");
    }
    amplitudes /= norm;
    return QuantumState(shape, std::move(amplitudes));
}

QuantumState QuantumState::product(const SpinVector &spins, int n, RegisterShape shape) {
    if (n < 0 || n > shape.n_max()) {
        throw std::out_of_range("Fock index " + std::to_string(n) + " outside [0, " +
                                std::to_string(shape.n_max()) + "]");
    }
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(shape.dim());
    for (int s = 0; s < 4; ++s) {
        amps(shape.index(s, n)) = spins(s);
    }
    return QuantumState(shape, std::move(amps));
}

double QuantumState::fock_population(int n) const {
    double p = 0;
    for (int s = 0; s < 4; ++s) {
        p += std::norm(amplitude(s, n));
    }
    return p;
}

double QuantumState::mean_phonon_number() const {
    double m = 0;
    for (int n = 0; n <= shape_.n_max(); ++n) {
        m += n * fock_population(n);
    }
    return m;
}

void ThermalSpec::validate() const {
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
        throw ConfigError("ThermalSpec: nbar must be finite and >= 0");
    }
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) {
        throw ConfigError("ThermalSpec: tail_tol must lie in (0, 1)");
    }
}

namespace {

// Mass of the geometric distribution above n_max.
double thermal_tail(double nbar, int n_max) {
    if (nbar == 0.0) {
        return 0.0;
    }
    double q = nbar / (nbar + 1.0);
    return std::pow(q, n_max + 1);
}

// n̄ minus the mean of the renormalized truncated distribution.
double thermal_mean_shortfall(double nbar, int n_max) {
    double tail = thermal_tail(nbar, n_max);
    return (n_max + 1.0) * tail / (1.0 - tail);
}

bool cutoff_ok(const ThermalSpec &spec, int n_max) {
    return thermal_tail(spec.nbar, n_max) < spec.tail_tol &&
           thermal_mean_shortfall(spec.nbar, n_max) <= spec.tail_tol * (spec.nbar + 1.0);
}

}  // namespace

std::vector<FockWeight> thermal_weights(const ThermalSpec &spec, const RegisterShape &shape) {
    spec.validate();
    if (spec.nbar == 0.0) {
        return {{0, 1.0}};
    }
    double tail = thermal_tail(spec.nbar, shape.n_max());
    if (tail >= spec.tail_tol) {
        throw CutoffTooSmall("thermal_weights: tail mass " + std::to_string(tail) + " above n_max=" +
                             std::to_string(shape.n_max()) + " is not below tail_tol=" +
                             std::to_string(spec.tail_tol) + " for nbar=" + std::to_string(spec.nbar));
    }
    if (!cutoff_ok(spec, shape.n_max())) {
        throw CutoffTooSmall("thermal_weights: truncated mean misses nbar=" + std::to_string(spec.nbar) +
                             " by more than tail_tol*(nbar+1) at n_max=" + std::to_string(shape.n_max()));
    }
    std::vector<FockWeight> out;
    out.reserve(shape.fock_dim());
    double q = spec.nbar / (spec.nbar + 1.0);
    double p = 1.0 / (spec.nbar + 1.0);
    double total = 0;
    for (int n = 0; n <= shape.n_max(); ++n) {
        out.push_back({n, p});
        total += p;
        p *= q;
    }
    for (auto &w : out) {
        w.weight /= total;
    }
    return out;
}

int thermal_cutoff(const ThermalSpec &spec) {
    spec.validate();
    if (spec.nbar == 0.0) {
        return 1;
    }
    int n = 1;
    while (!cutoff_ok(spec, n)) {
        ++n;
    }
    return n;
}

RegisterShape default_shape(const ThermalSpec &spec) {
    int by_rule = static_cast<int>(std::ceil(10.0 * (spec.nbar + 1.0)));
    return RegisterShape(std::max(by_rule, thermal_cutoff(spec) + 15));
}

QuantumState compose_state(Level be, Level mg, int n, const RegisterShape &shape) {
    SpinVector spins = SpinVector::Zero();
    spins(spin_index(be, mg)) = 1.0;
    return QuantumState::product(spins, n, shape);
}

double fidelity(const QuantumState &a, const QuantumState &b) {
    if (!(a.shape() == b.shape())) {
        throw ShapeMismatch("fidelity: states live on different registers");
    }
    return std::norm(a.amplitudes().dot(b.amplitudes()));
}

namespace {

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd &m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double fidelity(const SpinMatrix &rho, const SpinMatrix &sigma) {
    Eigen::MatrixXcd sr = psd_sqrt(rho);
    Eigen::MatrixXcd inner = sr * sigma * sr;
    inner = (inner + inner.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(inner);
    double tr = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return std::clamp(tr * tr, 0.0, 1.0);
}

double fidelity(const SpinMatrix &rho, const SpinVector &psi) {
    return std::clamp(std::real(psi.dot(rho * psi)), 0.0, 1.0);
}

std::array<double, 4> qubit_populations(const QuantumState &state) {
    std::array<double, 4> p{};
    const auto &shape = state.shape();
    for (int s = 0; s < 4; ++s) {
        p[s] = state.amplitudes().segment(shape.index(s, 0), shape.fock_dim()).squaredNorm();
    }
    return p;
}

SpinMatrix reduced_qubit_density(const QuantumState &state) {
    const auto &shape = state.shape();
    Eigen::Map<const Eigen::MatrixXcd> m(state.amplitudes().data(), shape.fock_dim(), 4);
    // m(n, s) = ψ(s, n); ρ = mᵀ m*.
    SpinMatrix rho = m.transpose() * m.conjugate();
    return rho;
}

Eigen::Matrix2cd single_qubit_density(const SpinMatrix &rho, Species species) {
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
    for (int s = 0; s < 4; ++s) {
        for (int t = 0; t < 4; ++t) {
            Species other = species == Species::Be ? Species::Mg : Species::Be;
            if (level_of(s, other) != level_of(t, other)) {
                continue;
            }
            out(static_cast<int>(level_of(s, species)), static_cast<int>(level_of(t, species))) += rho(s, t);
        }
    }
    return out;
}

SpinVector phi_plus() {
    SpinVector v = SpinVector::Zero();
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return v;
}

double bell_fidelity_local_frame(const SpinMatrix &rho) {
    return std::clamp(0.5 * std::real(rho(0, 0) + rho(3, 3)) + std::abs(rho(0, 3)), 0.0, 1.0);
}

double trace_distance(const SpinMatrix &rho, const SpinMatrix &sigma) {
    Eigen::Matrix4cd d = rho - sigma;
    d = (d + d.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(d);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double purity(const Eigen::MatrixXcd &rho) { return std::real((rho * rho).trace()); }

}  // namespace mixedion
