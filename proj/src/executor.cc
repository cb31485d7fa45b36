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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "mixedion/errors.h"
#include "mixedion/parallel.h"
#include "mixedion/sequences.h"

namespace mixedion {

namespace {

Species other(Species s) { return s == Species::Be ? Species::Mg : Species::Be; }

std::uint64_t double_bits(double x) {
    std::uint64_t b;
    std::memcpy(&b, &x, sizeof b);
    return b;
}

int sample_fock(const std::vector<FockWeight> &weights, double u) {
    double acc = 0;
    for (const FockWeight &w : weights) {
        acc += w.weight;
        if (u < acc) return w.n;
    }
    return weights.back().n;
}

}  // namespace

Executor::Executor(IonSystem system, const MSDriveParams &reference_drive, NoiseBudget budget,
                   DetectorModel detector, int threads)
    : system_(std::move(system)), budget_(budget), detector_(detector), threads_(std::max(threads, 1)) {
    system_.validate();
    budget_.validate();
    detector_.validate();
    for (Species s : kAllSpecies) detector_[s].threshold = detector_.threshold(s);
    reference_drive.validate();
    rates_ = calibrate_rates(budget_, reference_drive, system_);
}

std::shared_ptr<const MSEvolver> Executor::evolver(const MSDriveParams &drive, const RegisterShape &shape) const {
    std::uint64_t key = drive.parameter_hash();
    key = splitmix64(key ^ static_cast<std::uint64_t>(drive.model));
    key = splitmix64(key ^ double_bits(drive.ledger.ms_adjust()));
    for (double c : drive.stark_compensation) key = splitmix64(key ^ double_bits(c));
    std::lock_guard<std::mutex> lock(cache_mu_);
    auto &slot = cache_[{key, shape.n_max()}];
    if (!slot) slot = std::make_shared<const MSEvolver>(drive, system_.species, shape);
    return slot;
}

void Executor::evolve(const Sequence &seq, Eigen::VectorXcd &psi, const RegisterShape &shape,
                      const ShotNoise *noise, std::uint32_t *flags) const {
    if (psi.size() != shape.dim()) throw ShapeMismatch("Executor::evolve: state does not match register");
    const std::array<double, 2> zero{0, 0};
    const std::array<double, 2> &det = noise ? noise->detuning : zero;
    const std::array<double, 2> &drift = noise ? noise->drift : zero;
    std::uint32_t local_flags = 0;

    auto idle = [&](Species s, double h) {
        if (det[idx(s)] != 0) apply_z_phase(psi, shape, s, det[idx(s)] * h);
    };

    auto advance = [&](const Pulse &p, double a, double b) {
        double h = b - a;
        if (!(h > 0)) return;
        if (auto c = std::get_if<CarrierPulse>(&p)) {
            Species j = c->species;
            double phi = c->phi + (c->source == Source::Laser ? c->ledger_offset + drift[idx(j)] : 0.0);
            apply_single_qubit(psi, shape, j, evolve_two_level(carrier_hamiltonian(c->rabi, phi, det[idx(j)]), h));
            idle(other(j), h);
        } else if (auto s = std::get_if<SidebandPulse>(&p)) {
            Species j = s->species;
            apply_sideband(psi, shape, j, s->branch, s->phi + s->ledger_offset + drift[idx(j)], s->omega0, s->eta,
                           s->model, h, det[idx(j)]);
            idle(other(j), h);
        } else if (auto m = std::get_if<MSPulse>(&p)) {
            auto ev = evolver(m->drive, shape);
            std::array<double, 2> optical;
            for (Species j : kAllSpecies) optical[idx(j)] = m->drive.ledger.optical_offset(j) + drift[idx(j)];
            double worst = std::max(std::abs(det[0]), std::abs(det[1]));
            if (worst == 0) {
                ev->evolve(psi, a, b, optical);
                return;
            }
            // Symmetric splitting of the qubit detuning around exact MS steps.
            int steps = static_cast<int>(std::clamp(std::ceil(worst * h / 0.02), 1.0, 4096.0));
            double dt = h / steps;
            for (int k = 0; k < steps; ++k) {
                double t0 = a + k * dt;
                idle(Species::Be, dt / 2);
                idle(Species::Mg, dt / 2);
                ev->evolve(psi, t0, k + 1 == steps ? b : t0 + dt, optical);
                idle(Species::Be, dt / 2);
                idle(Species::Mg, dt / 2);
            }
        } else if (std::holds_alternative<WaitPulse>(p)) {
            idle(Species::Be, h);
            idle(Species::Mg, h);
        }
    };

    size_t si = 0, hi = 0;
    auto apply_events_before = [&](double limit, const Pulse *p, double t_start, double &cursor) {
        if (!noise) return;
        for (;;) {
            bool has_s = si < noise->scatters.size() && noise->scatters[si].time < limit;
            bool has_h = hi < noise->jumps.size() && noise->jumps[hi].time < limit;
            if (!has_s && !has_h) return;
            bool take_s = has_s && (!has_h || noise->scatters[si].time <= noise->jumps[hi].time);
            double when = take_s ? noise->scatters[si].time : noise->jumps[hi].time;
            if (p) {
                double local = std::max(cursor, when - t_start);
                advance(*p, cursor, local);
                cursor = local;
            }
            if (take_s) {
                apply_scattering(psi, shape, noise->scatters[si++]);
                local_flags |= kFlagScatter;
            } else {
                if (apply_heating_jump(psi, shape, noise->jumps[hi++].direction)) {
                    local_flags |= kFlagHeating;
                } else {
                    local_flags |= kFlagVacuumJump;
                }
            }
        }
    };

    double t = 0;
    for (const Pulse &p : seq.pulses()) {
        double dur = pulse_duration(p);
        double cursor = 0;
        apply_events_before(t + dur, &p, t, cursor);
        advance(p, cursor, dur);
        t += dur;
    }
    double unused = 0;
    apply_events_before(std::numeric_limits<double>::infinity(), nullptr, t, unused);
    if (flags) *flags |= local_flags;
}

QuantumState Executor::evolve(const Sequence &seq, const QuantumState &state) const {
    Eigen::VectorXcd psi = state.amplitudes();
    evolve(seq, psi, state.shape());
    return QuantumState::normalized(state.shape(), psi);
}

ShotRecord Executor::run_shot(const Sequence &seq, const InitialEnsemble &ensemble, const RegisterShape &shape,
                              const std::vector<FockWeight> &weights, const Timeline &timeline, std::uint64_t seed,
                              std::uint64_t shot) const {
    ShotRecord rec;
    rec.shot = shot;
    rec.analysis = seq.analysis;
    if (!seq.measured()) rec.flags |= kFlagNotMeasured;

    Rng thermal_rng = shot_rng(seed, shot, Stream::Thermal);
    rec.initial_n = sample_fock(weights, uniform01(thermal_rng));

    ShotNoise noise = sample_shot(budget_, rates_, timeline, seed, shot);
    Level be = ensemble.be, mg = ensemble.mg;
    if (noise.prep_flip[0]) be = be == Level::Up ? Level::Down : Level::Up;
    if (noise.prep_flip[1]) mg = mg == Level::Up ? Level::Down : Level::Up;
    Eigen::VectorXcd psi = compose_state(be, mg, rec.initial_n, shape).amplitudes();
    evolve(seq, psi, shape, &noise, &rec.flags);

    double top = 0;
    for (int s = 0; s < 4; ++s) top += std::norm(psi(shape.index(s, shape.n_max())));
    if (top > 1e-6) rec.flags |= kFlagCutoffTail;

    Rng measure_rng = shot_rng(seed, shot, Stream::Measure);
    int outcome = project_spins(psi, shape, uniform01(measure_rng));
    if (noise.detect_flip[0]) outcome ^= 2;
    if (noise.detect_flip[1]) outcome ^= 1;
    rec.true_outcome = outcome;

    Rng photon_rng = shot_rng(seed, shot, Stream::Photons);
    rec.counts = photon_counts(outcome, detector_, photon_rng);
    rec.outcome = classify(rec.counts, detector_);
    return rec;
}

std::vector<ShotRecord> Executor::execute(const Sequence &seq, const InitialEnsemble &ensemble, long shots,
                                          std::uint64_t seed, std::uint64_t first_shot) const {
    if (shots < 1) throw ConfigError("execute: shots must be >= 1");
    RegisterShape shape = ensemble.shape();
    std::vector<FockWeight> weights = thermal_weights(ensemble.thermal, shape);
    Timeline timeline = seq.timeline();
    for (const Pulse &p : seq.pulses()) {
        if (auto m = std::get_if<MSPulse>(&p)) evolver(m->drive, shape);
    }
    std::vector<ShotRecord> records(shots);
    parallel_for(shots, threads_, [&](long i) {
        records[i] = run_shot(seq, ensemble, shape, weights, timeline, seed, first_shot + i);
    });
    return records;
}

SpinMatrix Executor::thermal_density(const Sequence &seq, const InitialEnsemble &ensemble) const {
    RegisterShape shape = ensemble.shape();
    SpinMatrix rho = SpinMatrix::Zero();
    for (const FockWeight &w : thermal_weights(ensemble.thermal, shape)) {
        Eigen::VectorXcd psi = compose_state(ensemble.be, ensemble.mg, w.n, shape).amplitudes();
        evolve(seq, psi, shape);
        rho += w.weight * reduced_qubit_density(QuantumState::normalized(shape, psi));
    }
    return rho;
}

std::array<double, 4> Executor::thermal_populations(const Sequence &seq, const InitialEnsemble &ensemble) const {
    SpinMatrix rho = thermal_density(seq, ensemble);
    return {rho(0, 0).real(), rho(1, 1).real(), rho(2, 2).real(), rho(3, 3).real()};
}

}  // namespace mixedion
