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

#include "mixedion/dynamics.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "mixedion/errors.h"

namespace mixedion {

namespace {

constexpr double kAmu = 1.66053906660e-27;

cplx expi(double x) { return {std::cos(x), std::sin(x)}; }

// Normalized ladder amplitude for n ↔ n+1 relative to the 0 ↔ 1 coupling.
double ladder_ratio(int n, double eta, CouplingModel model) {
    if (model == CouplingModel::LambDicke) {
        return std::sqrt(n + 1.0);
    }
    return sideband_coupling(n, +1, eta, 1.0, model) / sideband_coupling(0, +1, eta, 1.0, model);
}

void hash_bytes(std::uint64_t &h, const void *data, size_t n) {
    auto p = static_cast<const unsigned char *>(data);
    for (size_t k = 0; k < n; ++k) {
        h ^= p[k];
        h *= 1099511628211ull;
    }
}

void hash_double(std::uint64_t &h, double x) { hash_bytes(h, &x, sizeof x); }

}  // namespace

const char *model_name(CouplingModel m) { return m == CouplingModel::LambDicke ? "lamb-dicke" : "exact-laguerre"; }

void SpeciesParams::validate() const {
    std::string name = species_name(label);
    if (!(mass > 0)) throw ConfigError(name + ": mass must be positive");
    if (!(eta > 0 && eta < 1)) throw ConfigError(name + ": eta must lie in (0, 1)");
    if (!(carrier_rabi >= 0)) throw ConfigError(name + ": carrier_rabi must be non-negative");
    if (!(microwave_rabi >= 0)) throw ConfigError(name + ": microwave_rabi must be non-negative");
}

void ModeParams::validate() const {
    if (!(omega_z > 0)) throw ConfigError("mode: omega_z must be positive");
    if (!(heating_rate >= 0)) throw ConfigError("mode: heating_rate must be non-negative");
}

ModeParams default_mode() { return {kTwoPi * 2.5e6, 0.0, ModeLabel::InPhase}; }

SpeciesParams default_beryllium() { return {Species::Be, 9.0121831 * kAmu, 0.0, 0.156, kTwoPi * 50e3}; }

SpeciesParams default_magnesium() { return {Species::Mg, 24.98583696 * kAmu, 0.0, 0.265, kTwoPi * 50e3}; }

void IonSystem::validate() const {
    for (Species s : kAllSpecies) {
        (*this)[s].validate();
        if ((*this)[s].label != s) throw ConfigError("species parameters out of order");
    }
    mode.validate();
}

double wrap_phase(double phi) {
    double r = std::fmod(phi, kTwoPi);
    if (r < 0) r += kTwoPi;
    if (r >= kTwoPi) r = 0;
    return r;
}

double wrap_signed(double phi) {
    double r = wrap_phase(phi);
    return r > kPi ? r - kTwoPi : r;
}

void PhaseLedger::set_sideband_phases(Species s, double phi_r, double phi_b) {
    phi_r_[idx(s)] = wrap_phase(phi_r);
    phi_b_[idx(s)] = wrap_phase(phi_b);
}

double PhaseLedger::effective_phi_r(Species s) const {
    return phi_r_[idx(s)] + rf_offset_ + adjust_ + optical_offset(s);
}

double PhaseLedger::effective_phi_b(Species s) const {
    return phi_b_[idx(s)] + rf_offset_ + adjust_ + optical_offset(s);
}

PhaseLedger PhaseLedger::without_optical_offsets() const {
    PhaseLedger r = *this;
    r.path_ = {0, 0};
    r.drift_ = {0, 0};
    return r;
}

void MSDriveParams::validate() const {
    if (!(delta != 0) || !std::isfinite(delta)) throw ConfigError("MS drive: delta must be nonzero");
    if (!(duration > 0)) throw ConfigError("MS drive: duration must be positive");
    for (double r : rabi) {
        if (!(r >= 0)) throw ConfigError("MS drive: Rabi rates must be non-negative");
    }
}

std::uint64_t MSDriveParams::parameter_hash() const {
    std::uint64_t h = 14695981039346656037ull;
    for (Species s : kAllSpecies) {
        hash_double(h, rabi[idx(s)]);
        hash_double(h, ledger.phi_r(s));
        hash_double(h, ledger.phi_b(s));
        hash_double(h, stark_shift[idx(s)]);
        hash_double(h, spectator_enabled ? spectator[idx(s)] : 0.0);
    }
    hash_double(h, delta);
    hash_double(h, duration);
    hash_double(h, ledger.ms_rf_offset());
    return h;
}

MSDriveParams gate_condition_drive(double t_ms, CouplingModel model) {
    if (!(t_ms > 0)) throw ConfigError("gate time must be positive");
    MSDriveParams d;
    d.delta = kTwoPi / t_ms;
    d.duration = t_ms;
    d.rabi = {d.delta / 4, d.delta / 4};
    d.model = model;
    return d;
}

IonSystem system_for_drive(const MSDriveParams &drive, IonSystem base) {
    for (Species s : kAllSpecies) {
        base[s].carrier_rabi = drive.rabi[idx(s)] / base[s].eta;
    }
    base.model = drive.model;
    return base;
}

double sideband_coupling(int n, int step, double eta, double omega0, CouplingModel model) {
    if (step != 1 && step != -1) throw ConfigError("sideband_coupling: step must be +1 or -1");
    if (n < 0 || n + step < 0) {
        throw ConfigError("sideband_coupling: negative Fock index");
    }
    int m = std::min(n, n + step);
    if (model == CouplingModel::LambDicke) {
        return omega0 * eta * std::sqrt(m + 1.0);
    }
    double x = eta * eta;
    return omega0 * std::exp(-x / 2) * eta * std::assoc_laguerre(m, 1, x) / std::sqrt(m + 1.0);
}

Eigen::Matrix2cd carrier_unitary(double theta, double phi) {
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    const cplx i(0, 1);
    Eigen::Matrix2cd u;
    u << c, -i * s * expi(phi), -i * s * expi(-phi), c;
    return u;
}

Eigen::Matrix2cd carrier_hamiltonian(double omega0, double phi, double detuning) {
    Eigen::Matrix2cd h;
    h << detuning / 2, omega0 / 2 * expi(phi), omega0 / 2 * expi(-phi), -detuning / 2;
    return h;
}

Eigen::Matrix2cd evolve_two_level(const Eigen::Matrix2cd &h, double t) {
    // H = a·1 + b·σ with real a and real 3-vector b.
    double a = (h(0, 0).real() + h(1, 1).real()) / 2;
    double bz = (h(0, 0).real() - h(1, 1).real()) / 2;
    double bx = h(0, 1).real(), by = -h(0, 1).imag();
    double b = std::sqrt(bx * bx + by * by + bz * bz);
    const cplx i(0, 1);
    Eigen::Matrix2cd u;
    if (b == 0) {
        u.setIdentity();
    } else {
        double c = std::cos(b * t), s = std::sin(b * t) / b;
        u(0, 0) = c - i * s * bz;
        u(1, 1) = c + i * s * bz;
        u(0, 1) = -i * s * cplx(bx, -by);
        u(1, 0) = -i * s * cplx(bx, by);
    }
    return expi(-a * t) * u;
}

Eigen::MatrixXcd MSHamiltonianParts::at(double t) const {
    Eigen::MatrixXcd low = Eigen::MatrixXcd(lower) * expi(-delta * t);
    Eigen::MatrixXcd h = low + low.adjoint();
    h.diagonal() += diagonal.cast<cplx>();
    return h;
}

MSHamiltonianParts ms_hamiltonian_parts(const MSDriveParams &drive, const std::array<SpeciesParams, 2> &species,
                                        const RegisterShape &shape) {
    const int dim = shape.dim();
    std::vector<Eigen::Triplet<cplx>> trip;
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
    for (Species j : kAllSpecies) {
        double omega = drive.rabi[idx(j)];
        double eta = species[idx(j)].eta;
        cplx raise = expi(drive.ledger.effective_phi_r(j));   // σ†a
        cplx lower = expi(-drive.ledger.effective_phi_b(j));  // σa
        double shift = drive.stark_shift[idx(j)] + drive.stark_compensation[idx(j)] + spectator_shift(drive, j);
        for (int s = 0; s < 4; ++s) {
            bool up = level_of(s, j) == Level::Up;
            int flipped = s ^ (j == Species::Be ? 2 : 1);
            for (int n = 0; n <= shape.n_max(); ++n) {
                if (up) diag(shape.index(s, n)) += shift;
                if (n == shape.n_max() || omega == 0) continue;
                // ⟨s', n| L |s, n+1⟩
                double g = omega * ladder_ratio(n, eta, drive.model);
                trip.emplace_back(shape.index(flipped, n), shape.index(s, n + 1), g * (up ? lower : raise));
            }
        }
    }
    MSHamiltonianParts parts;
    parts.lower.resize(dim, dim);
    parts.lower.setFromTriplets(trip.begin(), trip.end());
    parts.diagonal = diag;
    parts.delta = drive.delta;
    return parts;
}

Eigen::MatrixXcd ms_hamiltonian(const MSDriveParams &drive, const std::array<SpeciesParams, 2> &species,
                                const RegisterShape &shape, double t) {
    return ms_hamiltonian_parts(drive, species, shape).at(t);
}

void TimeDependentHamiltonian::add_term(Eigen::SparseMatrix<cplx> op, std::function<cplx(double)> coeff) {
    if (op.rows() != op.cols() || (dim_ >= 0 && op.rows() != dim_)) {
        throw ShapeMismatch("TimeDependentHamiltonian: operator dimension mismatch");
    }
    dim_ = static_cast<int>(op.rows());
    op.makeCompressed();
    terms_.push_back({std::move(op), std::move(coeff)});
}

void TimeDependentHamiltonian::add_diagonal(Eigen::VectorXd diag) {
    if (dim_ >= 0 && diag.size() != dim_) throw ShapeMismatch("TimeDependentHamiltonian: diagonal size mismatch");
    dim_ = static_cast<int>(diag.size());
    if (diag_.size() == 0) {
        diag_ = std::move(diag);
    } else {
        diag_ += diag;
    }
}

void TimeDependentHamiltonian::apply(double t, const Eigen::VectorXcd &x, Eigen::VectorXcd &y) const {
    if (diag_.size() != 0) {
        y = diag_.cast<cplx>().cwiseProduct(x);
    } else {
        y.setZero(x.size());
    }
    for (const Term &term : terms_) {
        y.noalias() += term.coeff(t) * (term.op * x);
    }
}

TimeDependentHamiltonian TimeDependentHamiltonian::from_ms(const MSHamiltonianParts &parts) {
    TimeDependentHamiltonian h;
    double delta = parts.delta;
    h.add_term(parts.lower, [delta](double t) { return expi(-delta * t); });
    h.add_term(parts.lower.adjoint(), [delta](double t) { return expi(delta * t); });
    h.add_diagonal(parts.diagonal);
    return h;
}

StepPolicy ms_step_policy(double delta) {
    StepPolicy p;
    p.max_step = kTwoPi / std::abs(delta) / 200;
    return p;
}

namespace {

Eigen::VectorXcd rk4(const Eigen::VectorXcd &psi0, const TimeDependentHamiltonian &h, double duration, int steps) {
    const cplx mi(0, -1);
    double dt = duration / steps;
    Eigen::VectorXcd psi = psi0, k1, k2, k3, k4, tmp;
    for (int k = 0; k < steps; ++k) {
        double t = k * dt;
        h.apply(t, psi, k1);
        k1 *= mi;
        tmp = psi + (dt / 2) * k1;
        h.apply(t + dt / 2, tmp, k2);
        k2 *= mi;
        tmp = psi + (dt / 2) * k2;
        h.apply(t + dt / 2, tmp, k3);
        k3 *= mi;
        tmp = psi + dt * k3;
        h.apply(t + dt, tmp, k4);
        k4 *= mi;
        psi += (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return psi;
}

}  // namespace

PropagationResult propagate_vector(const Eigen::VectorXcd &psi0, const TimeDependentHamiltonian &h,
                                   double duration, const StepPolicy &policy) {
    if (duration < 0) throw ConfigError("propagate: negative duration");
    if (h.dim() >= 0 && psi0.size() != h.dim()) throw ShapeMismatch("propagate: state/Hamiltonian size mismatch");
    PropagationResult r;
    if (duration == 0 || h.dim() < 0) {
        r.psi = psi0;
        return r;
    }
    int n = std::max(policy.min_steps, 1);
    if (policy.max_step > 0) {
        n = std::max(n, static_cast<int>(std::ceil(duration / policy.max_step)));
    }
    Eigen::VectorXcd coarse = rk4(psi0, h, duration, n);
    for (;;) {
        if (2 * n > policy.max_steps) {
            throw ConvergenceError("propagate: no convergence within " + std::to_string(policy.max_steps) +
                                   " steps");
        }
        Eigen::VectorXcd fine = rk4(psi0, h, duration, 2 * n);
        double diff = (fine - coarse).norm();
        n *= 2;
        if (diff < policy.tol) {
            r.psi = std::move(fine);
            r.steps = n;
            r.richardson_diff = diff;
            return r;
        }
        coarse = std::move(fine);
    }
}

QuantumState propagate(const QuantumState &state, const TimeDependentHamiltonian &h, double duration,
                       const StepPolicy &policy) {
    return QuantumState(state.shape(), propagate_vector(state.amplitudes(), h, duration, policy).psi);
}

QuantumState propagate(const QuantumState &state, const std::function<Eigen::MatrixXcd(double)> &h,
                       double duration, const StepPolicy &policy) {
    const int dim = state.shape().dim();
    const cplx mi(0, -1);
    auto deriv = [&](double t, const Eigen::VectorXcd &x) -> Eigen::VectorXcd {
        Eigen::MatrixXcd m = h(t);
        if (m.rows() != dim || m.cols() != dim) throw ShapeMismatch("propagate: Hamiltonian has wrong size");
        return mi * (m * x);
    };
    auto run = [&](int steps) {
        double dt = duration / steps;
        Eigen::VectorXcd psi = state.amplitudes();
        for (int k = 0; k < steps; ++k) {
            double t = k * dt;
            Eigen::VectorXcd k1 = deriv(t, psi);
            Eigen::VectorXcd k2 = deriv(t + dt / 2, psi + (dt / 2) * k1);
            Eigen::VectorXcd k3 = deriv(t + dt / 2, psi + (dt / 2) * k2);
            Eigen::VectorXcd k4 = deriv(t + dt, psi + dt * k3);
            psi += (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
        }
        return psi;
    };
    if (duration < 0) throw ConfigError("propagate: negative duration");
    if (duration == 0) return state;
    int n = std::max(policy.min_steps, 1);
    if (policy.max_step > 0) n = std::max(n, static_cast<int>(std::ceil(duration / policy.max_step)));
    Eigen::VectorXcd coarse = run(n);
    for (;;) {
        if (2 * n > policy.max_steps) throw ConvergenceError("propagate: no convergence");
        Eigen::VectorXcd fine = run(2 * n);
        double diff = (fine - coarse).norm();
        n *= 2;
        if (diff < policy.tol) return QuantumState(state.shape(), std::move(fine));
        coarse = std::move(fine);
    }
}

std::pair<double, double> geometric_phase(double omega, double delta, double dphi_m) {
    if (delta == 0) throw ConfigError("geometric_phase: delta must be nonzero");
    double scale = 8 * kPi * omega * omega / (delta * delta);
    double c = std::cos(dphi_m / 2), s = std::sin(dphi_m / 2);
    return {scale * c * c, scale * s * s};
}

MSBranch ms_branch(const MSDriveParams &drive, int s_be, int s_mg, double t) {
    MSBranch b;
    b.force = drive.rabi[0] * double(s_be) * expi(drive.ledger.effective_phi_m(Species::Be)) +
              drive.rabi[1] * double(s_mg) * expi(drive.ledger.effective_phi_m(Species::Mg));
    double d = drive.delta;
    b.alpha = -std::conj(b.force) * (expi(d * t) - 1.0) / d;
    b.phase = std::norm(b.force) * (d * t - std::sin(d * t)) / (d * d);
    return b;
}

Eigen::Vector2cd sigma_phi_eigenvector(double phi_s, int s) {
    Eigen::Vector2cd v;
    v << 1.0, double(s) * expi(-phi_s);
    return v / std::sqrt(2.0);
}

Eigen::MatrixXcd displacement_matrix(cplx alpha, int n_max) {
    const int d = n_max + 1;
    Eigen::MatrixXcd m(d, d);
    double x = std::norm(alpha);
    double r = std::abs(alpha), arg = std::arg(alpha);
    if (r == 0) return Eigen::MatrixXcd::Identity(d, d);
    double lr = std::log(r);
    for (int row = 0; row < d; ++row) {
        for (int col = 0; col < d; ++col) {
            int lo = std::min(row, col), k = std::abs(row - col);
            double mag = std::exp(0.5 * (std::lgamma(lo + 1.0) - std::lgamma(lo + k + 1.0)) + k * lr - x / 2);
            double lag = std::assoc_laguerre(lo, k, x);
            // (α)^k below the diagonal, (−α*)^k above.
            double ph = row >= col ? k * arg : k * (kPi - arg);
            m(row, col) = mag * lag * expi(ph);
        }
    }
    return m;
}

QuantumState ms_analytic(const MSDriveParams &drive, double t, const QuantumState &initial) {
    if (drive.model != CouplingModel::LambDicke) {
        throw ConfigError("ms_analytic: only valid in the Lamb-Dicke model");
    }
    for (Species j : kAllSpecies) {
        if (drive.stark_shift[idx(j)] + drive.stark_compensation[idx(j)] != 0 || spectator_shift(drive, j) != 0) {
            throw ConfigError("ms_analytic: diagonal shifts are not supported");
        }
    }
    const RegisterShape &shape = initial.shape();
    const int fd = shape.fock_dim();
    Eigen::Map<const Eigen::MatrixXcd> in(initial.amplitudes().data(), fd, 4);  // column per spin
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(fd, 4);
    for (int sb : {1, -1}) {
        for (int sm : {1, -1}) {
            Eigen::Vector2cd vb = sigma_phi_eigenvector(drive.ledger.effective_phi_s(Species::Be), sb);
            Eigen::Vector2cd vm = sigma_phi_eigenvector(drive.ledger.effective_phi_s(Species::Mg), sm);
            Eigen::Vector4cd b;
            b << vb(0) * vm(0), vb(0) * vm(1), vb(1) * vm(0), vb(1) * vm(1);
            Eigen::VectorXcd motion = in * b.conjugate();
            MSBranch br = ms_branch(drive, sb, sm, t);
            Eigen::VectorXcd moved = expi(br.phase) * (displacement_matrix(br.alpha, shape.n_max()) * motion);
            out += moved * b.transpose();
        }
    }
    Eigen::VectorXcd amps = Eigen::Map<Eigen::VectorXcd>(out.data(), out.size());
    return QuantumState::normalized(shape, amps);
}

double spectator_shift(const MSDriveParams &drive, Species species) {
    return drive.spectator_enabled ? drive.spectator[idx(species)] : 0.0;
}

void apply_single_qubit(Eigen::VectorXcd &psi, const RegisterShape &shape, Species species,
                        const Eigen::Matrix2cd &u) {
    const int mask = species == Species::Be ? 2 : 1;
    for (int s = 0; s < 4; ++s) {
        if (s & mask) continue;  // s has this species in ↑
        int t = s | mask;
        for (int n = 0; n <= shape.n_max(); ++n) {
            cplx a = psi(shape.index(s, n)), b = psi(shape.index(t, n));
            psi(shape.index(s, n)) = u(0, 0) * a + u(0, 1) * b;
            psi(shape.index(t, n)) = u(1, 0) * a + u(1, 1) * b;
        }
    }
}

void apply_z_phase(Eigen::VectorXcd &psi, const RegisterShape &shape, Species species, double angle) {
    cplx up = expi(-angle / 2), down = expi(angle / 2);
    for (int s = 0; s < 4; ++s) {
        cplx f = level_of(s, species) == Level::Up ? up : down;
        psi.segment(shape.index(s, 0), shape.fock_dim()) *= f;
    }
}

double sideband_duration(double theta, double omega0, double eta, CouplingModel model) {
    double g = sideband_coupling(0, +1, eta, omega0, model);
    if (!(g > 0)) throw ConfigError("sideband_duration: zero coupling");
    return theta / g;
}

void apply_sideband(Eigen::VectorXcd &psi, const RegisterShape &shape, Species species, SidebandBranch branch,
                    double phi, double omega0, double eta, CouplingModel model, double duration,
                    double detuning) {
    const int mask = species == Species::Be ? 2 : 1;
    // Uncoupled levels only see the detuning.
    cplx up_phase = expi(-detuning * duration / 2), down_phase = expi(detuning * duration / 2);
    for (int s = 0; s < 4; ++s) {
        if (s & mask) continue;
        int d = s | mask;
        std::vector<bool> done_up(shape.fock_dim(), false), done_down(shape.fock_dim(), false);
        for (int n = 0; n < shape.n_max(); ++n) {
            // Red: |↓, n+1⟩ ↔ |↑, n⟩. Blue: |↓, n⟩ ↔ |↑, n+1⟩.
            int n_up = branch == SidebandBranch::Red ? n : n + 1;
            int n_down = branch == SidebandBranch::Red ? n + 1 : n;
            double g = sideband_coupling(n, +1, eta, omega0, model);
            Eigen::Matrix2cd u = evolve_two_level(carrier_hamiltonian(g, phi, detuning), duration);
            int iu = shape.index(s, n_up), id = shape.index(d, n_down);
            cplx a = psi(iu), b = psi(id);
            psi(iu) = u(0, 0) * a + u(0, 1) * b;
            psi(id) = u(1, 0) * a + u(1, 1) * b;
            done_up[n_up] = true;
            done_down[n_down] = true;
        }
        for (int n = 0; n <= shape.n_max(); ++n) {
            if (!done_up[n]) psi(shape.index(s, n)) *= up_phase;
            if (!done_down[n]) psi(shape.index(d, n)) *= down_phase;
        }
    }
}

}  // namespace mixedion
