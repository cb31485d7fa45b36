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

#include "mixedion/noise.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "mixedion/errors.h"

namespace mixedion {

namespace {

void check_probability(double p, const char *name) {
    if (!(p >= 0 && p <= 1)) throw ConfigError(std::string("noise: ") + name + " must lie in [0, 1]");
}

Eigen::Matrix2cd pauli(int k) {
    const cplx i(0, 1);
    Eigen::Matrix2cd m;
    switch (k) {
        case 1: m << 0, 1, 1, 0; break;
        case 2: m << 0, -i, i, 0; break;
        case 3: m << 1, 0, 0, -1; break;
        default: m.setIdentity();
    }
    return m;
}

int draw_count(double mean, Rng &rng) {
    if (mean <= 0) return 0;
    std::poisson_distribution<int> d(mean);
    return d(rng);
}

double draw_window_time(const std::vector<std::pair<double, double>> &windows, double total, double u) {
    double target = u * total;
    for (const auto &[a, b] : windows) {
        double len = b - a;
        if (target < len) return a + target;
        target -= len;
    }
    return windows.back().second;
}

// Spinor of the noiseless qubit output from |↑↑⟩|0⟩.
struct GateReference {
    RegisterShape shape;
    MSEvolver evolver;
    Eigen::VectorXcd initial;
    SpinVector ideal;
};

GateReference gate_reference(const MSDriveParams &drive, const IonSystem &system) {
    RegisterShape shape(24);
    MSEvolver ev(drive, system.species, shape);
    QuantumState init = compose_state(Level::Up, Level::Up, 0, shape);
    Eigen::VectorXcd psi = init.amplitudes();
    std::array<double, 2> opt{0, 0};
    ev.evolve(psi, 0, drive.duration, opt);
    SpinMatrix rho = reduced_qubit_density(QuantumState::normalized(shape, psi));
    Eigen::SelfAdjointEigenSolver<SpinMatrix> eig(rho);
    return {shape, ev, init.amplitudes(), eig.eigenvectors().col(3)};
}

double infidelity(const GateReference &ref, const Eigen::VectorXcd &psi) {
    return 1 - fidelity(reduced_qubit_density(QuantumState::normalized(ref.shape, psi)), ref.ideal);
}

}  // namespace

const char *channel_name(ScatterChannel c) {
    switch (c) {
        case ScatterChannel::Raman: return "raman";
        case ScatterChannel::Rayleigh: return "rayleigh";
        default: return "depolarize";
    }
}

const char *law_name(DephasingLaw l) { return l == DephasingLaw::Gaussian ? "gaussian" : "exponential"; }

void NoiseBudget::validate() const {
    check_probability(p_scatter_mg, "p_scatter_mg");
    check_probability(p_scatter_be, "p_scatter_be");
    check_probability(p_heating, "p_heating");
    check_probability(spam_error, "spam_error");
    if (!(t2_be > 0) || !(t2_mg > 0)) throw ConfigError("noise: coherence times must be positive");
    if (!(path_drift_sigma >= 0)) throw ConfigError("noise: path_drift_sigma must be non-negative");
}

NoiseBudget NoiseBudget::none() {
    NoiseBudget b;
    b.p_scatter_mg = 0;
    b.p_scatter_be = 0;
    b.p_heating = 0;
    b.spam_error = 0;
    b.dephasing_be = false;
    b.dephasing_mg = false;
    b.path_drift_sigma = 0;
    return b;
}

bool NoiseBudget::is_zero() const {
    return p_scatter_mg == 0 && p_scatter_be == 0 && p_heating == 0 && spam_error == 0 && !dephasing_be &&
           !dephasing_mg && path_drift_sigma == 0;
}

double Timeline::laser_time(Species s) const {
    double t = 0;
    for (const auto &[a, b] : laser_windows[idx(s)]) t += b - a;
    return t;
}

bool ShotNoise::empty() const {
    return drift[0] == 0 && drift[1] == 0 && detuning[0] == 0 && detuning[1] == 0 && !prep_flip[0] &&
           !prep_flip[1] && !detect_flip[0] && !detect_flip[1] && scatters.empty() && jumps.empty();
}

double dephasing_detuning(DephasingLaw law, double t2, double u1, double u2) {
    if (law == DephasingLaw::Exponential) {
        return std::tan(kPi * (u1 - 0.5)) / t2;
    }
    double r = std::sqrt(-2 * std::log1p(-u1));
    return std::sqrt(2.0) / t2 * r * std::cos(kTwoPi * u2);
}

ShotNoise sample_shot(const NoiseBudget &budget, const NoiseRates &rates, const Timeline &timeline,
                      std::uint64_t master_seed, std::uint64_t shot) {
    if (!(timeline.duration >= 0)) throw ConfigError("sample_shot: negative sequence duration");
    ShotNoise noise;

    Rng drift_rng = shot_rng(master_seed, shot, Stream::Drift);
    std::normal_distribution<double> normal;
    for (Species s : kAllSpecies) {
        noise.drift[idx(s)] = budget.path_drift_sigma * normal(drift_rng);
    }

    Rng deph_rng = shot_rng(master_seed, shot, Stream::Dephasing);
    for (Species s : kAllSpecies) {
        double u1 = uniform01(deph_rng), u2 = uniform01(deph_rng);
        bool on = s == Species::Be ? budget.dephasing_be : budget.dephasing_mg;
        double t2 = s == Species::Be ? budget.t2_be : budget.t2_mg;
        noise.detuning[idx(s)] = on ? dephasing_detuning(budget.law, t2, u1, u2) : 0.0;
    }

    Rng spam_rng = shot_rng(master_seed, shot, Stream::Spam);
    for (Species s : kAllSpecies) {
        noise.prep_flip[idx(s)] = uniform01(spam_rng) < budget.spam_error / 4;
        noise.detect_flip[idx(s)] = uniform01(spam_rng) < budget.spam_error / 4;
    }

    Rng sc_rng = shot_rng(master_seed, shot, Stream::Scatter);
    for (Species s : kAllSpecies) {
        double exposure = timeline.laser_time(s);
        int count = draw_count(rates.scatter[idx(s)] * exposure, sc_rng);
        for (int k = 0; k < count; ++k) {
            ScatterEvent e;
            e.species = s;
            e.type = budget.channel;
            e.time = draw_window_time(timeline.laser_windows[idx(s)], exposure, uniform01(sc_rng));
            int pick = static_cast<int>(sc_rng() & 3);
            e.pauli = budget.channel == ScatterChannel::Rayleigh ? (pick & 1) * 3 : pick;
            e.collapse_u = uniform01(sc_rng);
            e.reset = (pick & 1) ? Level::Down : Level::Up;
            noise.scatters.push_back(e);
        }
    }
    std::stable_sort(noise.scatters.begin(), noise.scatters.end(),
                     [](const ScatterEvent &a, const ScatterEvent &b) { return a.time < b.time; });

    Rng heat_rng = shot_rng(master_seed, shot, Stream::Heating);
    int up = draw_count(rates.heating * timeline.duration, heat_rng);
    int down = draw_count(rates.heating_down * timeline.duration, heat_rng);
    for (int k = 0; k < up + down; ++k) {
        noise.jumps.push_back({uniform01(heat_rng) * timeline.duration, k < up ? +1 : -1});
    }
    std::stable_sort(noise.jumps.begin(), noise.jumps.end(),
                     [](const HeatingJump &a, const HeatingJump &b) { return a.time < b.time; });
    return noise;
}

void apply_scattering(Eigen::VectorXcd &psi, const RegisterShape &shape, const ScatterEvent &event) {
    if (event.type != ScatterChannel::Raman) {
        if (event.pauli != 0) apply_single_qubit(psi, shape, event.species, pauli(event.pauli));
        return;
    }
    double p_up = 0;
    for (int s = 0; s < 4; ++s) {
        if (level_of(s, event.species) == Level::Up) {
            p_up += psi.segment(shape.index(s, 0), shape.fock_dim()).squaredNorm();
        }
    }
    Level before = event.collapse_u < p_up ? Level::Up : Level::Down;
    for (int s = 0; s < 4; ++s) {
        if (level_of(s, event.species) != before) psi.segment(shape.index(s, 0), shape.fock_dim()).setZero();
    }
    psi.normalize();
    if (before != event.reset) apply_single_qubit(psi, shape, event.species, pauli(1));
}

QuantumState apply_scattering(const QuantumState &state, const ScatterEvent &event) {
    Eigen::VectorXcd psi = state.amplitudes();
    apply_scattering(psi, state.shape(), event);
    return QuantumState::normalized(state.shape(), psi);
}

bool apply_heating_jump(Eigen::VectorXcd &psi, const RegisterShape &shape, int direction) {
    if (direction != 1 && direction != -1) throw ConfigError("heating jump direction must be +1 or -1");
    const int fd = shape.fock_dim(), top = shape.n_max();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
    if (direction > 0) {
        double lost = 0, kept = 0;
        for (int s = 0; s < 4; ++s) {
            lost += (top + 1) * std::norm(psi(shape.index(s, top)));
            for (int n = 0; n < top; ++n) {
                out(shape.index(s, n + 1)) = std::sqrt(n + 1.0) * psi(shape.index(s, n));
            }
        }
        kept = out.squaredNorm();
        if (lost > 1e-6 * (kept + lost)) {
            throw CutoffTooSmall("heating jump pushes population past n_max = " + std::to_string(top));
        }
    } else {
        for (int s = 0; s < 4; ++s) {
            for (int n = 1; n < fd; ++n) {
                out(shape.index(s, n - 1)) = std::sqrt(double(n)) * psi(shape.index(s, n));
            }
        }
    }
    double norm = out.norm();
    if (norm < 1e-12) return false;
    psi = out / norm;
    return true;
}

QuantumState apply_heating_jump(const QuantumState &state, int direction, bool *applied) {
    Eigen::VectorXcd psi = state.amplitudes();
    bool ok = apply_heating_jump(psi, state.shape(), direction);
    if (applied) *applied = ok;
    return ok ? QuantumState(state.shape(), psi) : state;
}

QuantumState dephase_qubit(const QuantumState &state, Species species, double duration, double t2,
                           DephasingLaw law, Rng &rng) {
    if (!(t2 > 0)) throw ConfigError("dephase_qubit: t2 must be positive");
    double u1 = uniform01(rng), u2 = uniform01(rng);
    if (duration == 0) return state;
    Eigen::VectorXcd psi = state.amplitudes();
    apply_z_phase(psi, state.shape(), species, dephasing_detuning(law, t2, u1, u2) * duration);
    return QuantumState(state.shape(), psi);
}

double scatter_event_infidelity(const MSDriveParams &drive, const IonSystem &system, Species species,
                                ScatterChannel channel, int quadrature) {
    GateReference ref = gate_reference(drive, system);
    const std::array<double, 2> opt{0, 0};
    double total = 0;
    for (int k = 0; k < quadrature; ++k) {
        double t = (k + 0.5) * drive.duration / quadrature;
        Eigen::VectorXcd mid = ref.initial;
        ref.evolver.evolve(mid, 0, t, opt);
        double acc = 0;
        auto finish = [&](Eigen::VectorXcd psi) {
            ref.evolver.evolve(psi, t, drive.duration, opt);
            return infidelity(ref, psi);
        };
        ScatterEvent e;
        e.species = species;
        e.type = channel;
        if (channel == ScatterChannel::Depolarize) {
            for (int p = 0; p < 4; ++p) {
                e.pauli = p;
                Eigen::VectorXcd psi = mid;
                apply_scattering(psi, ref.shape, e);
                acc += finish(psi) / 4;
            }
        } else if (channel == ScatterChannel::Rayleigh) {
            for (int p : {0, 3}) {
                e.pauli = p;
                Eigen::VectorXcd psi = mid;
                apply_scattering(psi, ref.shape, e);
                acc += finish(psi) / 2;
            }
        } else {
            double p_up = 0;
            for (int s = 0; s < 4; ++s) {
                if (level_of(s, species) == Level::Up) {
                    p_up += mid.segment(ref.shape.index(s, 0), ref.shape.fock_dim()).squaredNorm();
                }
            }
            for (Level before : {Level::Up, Level::Down}) {
                double w = before == Level::Up ? p_up : 1 - p_up;
                if (w < 1e-15) continue;
                e.collapse_u = before == Level::Up ? 0.0 : 1.0;
                for (Level reset : {Level::Up, Level::Down}) {
                    e.reset = reset;
                    Eigen::VectorXcd psi = mid;
                    apply_scattering(psi, ref.shape, e);
                    acc += w / 2 * finish(psi);
                }
            }
        }
        total += acc;
    }
    return total / quadrature;
}

double heating_event_infidelity(const MSDriveParams &drive, const IonSystem &system, int quadrature) {
    GateReference ref = gate_reference(drive, system);
    const std::array<double, 2> opt{0, 0};
    double total = 0;
    for (int k = 0; k < quadrature; ++k) {
        double t = (k + 0.5) * drive.duration / quadrature;
        Eigen::VectorXcd psi = ref.initial;
        ref.evolver.evolve(psi, 0, t, opt);
        apply_heating_jump(psi, ref.shape, +1);
        ref.evolver.evolve(psi, t, drive.duration, opt);
        total += infidelity(ref, psi);
    }
    return total / quadrature;
}

NoiseRates calibrate_rates(const NoiseBudget &budget, const MSDriveParams &drive, const IonSystem &system) {
    budget.validate();
    NoiseRates rates;
    for (Species s : kAllSpecies) {
        double p = budget.p_scatter(s);
        if (p > 0) {
            double e = scatter_event_infidelity(drive, system, s, budget.channel);
            if (!(e > 0)) throw ConfigError("noise: scattering channel produces no gate error");
            rates.scatter[idx(s)] = p / (e * drive.duration);
        }
    }
    if (budget.p_heating > 0) {
        double e = heating_event_infidelity(drive, system);
        if (!(e > 0)) throw ConfigError("noise: heating jump produces no gate error");
        rates.heating = budget.p_heating / (e * drive.duration);
    }
    return rates;
}

}  // namespace mixedion
