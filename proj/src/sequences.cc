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

#include "mixedion/sequences.h"

#include <cmath>
#include <sstream>

#include "mixedion/errors.h"
#include "mixedion/format.h"
#include "sequences_internal.h"

namespace mixedion {

namespace {

void check_theta(double theta) {
    if (!(theta >= 0) || !std::isfinite(theta)) throw ConfigError("pulse: rotation angle must be finite and >= 0");
}

double checked_duration(double theta, double rabi, const char *what) {
    check_theta(theta);
    if (theta == 0) return 0;
    if (!(rabi > 0)) throw ConfigError(std::string(what) + ": Rabi rate must be positive");
    return theta / rabi;
}

}  // namespace

double pulse_duration(const Pulse &p) {
    return std::visit(
        [](const auto &x) -> double {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, MSPulse>) {
                return x.drive.duration;
            } else if constexpr (std::is_same_v<T, MeasurePulse>) {
                return 0.0;
            } else {
                return x.duration;
            }
        },
        p);
}

CarrierPulse microwave_pulse(Species s, double theta, double phi, const IonSystem &system) {
    CarrierPulse p;
    p.species = s;
    p.theta = theta;
    p.phi = phi;
    p.source = Source::Microwave;
    p.rabi = system[s].microwave_rabi;
    p.duration = checked_duration(theta, p.rabi, "microwave pulse");
    return p;
}

CarrierPulse laser_pulse(Species s, double theta, double phi, const IonSystem &system, const PhaseLedger &ledger) {
    CarrierPulse p;
    p.species = s;
    p.theta = theta;
    p.phi = phi;
    p.source = Source::Laser;
    p.rabi = system[s].carrier_rabi;
    p.duration = checked_duration(theta, p.rabi, "laser pulse");
    p.ledger_offset = ledger.optical_offset(s);
    return p;
}

SidebandPulse sideband_pulse(Species s, SidebandBranch branch, double theta, double phi, const IonSystem &system,
                             const PhaseLedger &ledger) {
    check_theta(theta);
    SidebandPulse p;
    p.species = s;
    p.branch = branch;
    p.theta = theta;
    p.phi = phi;
    p.omega0 = system[s].carrier_rabi;
    p.eta = system[s].eta;
    p.model = system.model;
    p.duration = theta == 0 ? 0.0 : sideband_duration(theta, p.omega0, p.eta, p.model);
    p.ledger_offset = ledger.optical_offset(s);
    return p;
}

Sequence &Sequence::add(Pulse p) {
    if (measured()) throw ConfigError("sequence '" + name_ + "': no pulse may follow Measure");
    std::visit(
        [](const auto &x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, CarrierPulse> || std::is_same_v<T, SidebandPulse>) {
                check_theta(x.theta);
            } else if constexpr (std::is_same_v<T, WaitPulse>) {
                if (!(x.duration >= 0)) throw ConfigError("wait: duration must be >= 0");
            } else if constexpr (std::is_same_v<T, MSPulse>) {
                x.drive.validate();
            }
        },
        p);
    pulses_.push_back(std::move(p));
    return *this;
}

double Sequence::duration() const {
    double t = 0;
    for (const Pulse &p : pulses_) t += pulse_duration(p);
    return t;
}

bool Sequence::measured() const {
    return !pulses_.empty() && std::holds_alternative<MeasurePulse>(pulses_.back());
}

Timeline Sequence::timeline() const {
    Timeline tl;
    double t = 0;
    auto window = [&](Species s, double d) {
        if (d > 0) tl.laser_windows[idx(s)].push_back({t, t + d});
    };
    for (const Pulse &p : pulses_) {
        double d = pulse_duration(p);
        if (auto c = std::get_if<CarrierPulse>(&p); c && c->source == Source::Laser) {
            window(c->species, d);
        } else if (auto s = std::get_if<SidebandPulse>(&p)) {
            window(s->species, d);
        } else if (std::holds_alternative<MSPulse>(p)) {
            window(Species::Be, d);
            window(Species::Mg, d);
        }
        t += d;
    }
    tl.duration = t;
    return tl;
}

std::string to_string(const Sequence &seq) {
    std::ostringstream out;
    int k = 0;
    for (const Pulse &p : seq.pulses()) {
        out << k++ << ' ';
        if (auto c = std::get_if<CarrierPulse>(&p)) {
            out << (c->source == Source::Laser ? "carrier-laser" : "carrier-microwave")
                << " species=" << species_name(c->species) << " theta=" << format_double(c->theta)
                << " phi=" << format_double(c->phi);
        } else if (auto s = std::get_if<SidebandPulse>(&p)) {
            out << (s->branch == SidebandBranch::Red ? "sideband-red" : "sideband-blue")
                << " species=" << species_name(s->species) << " theta=" << format_double(s->theta)
                << " phi=" << format_double(s->phi);
        } else if (auto m = std::get_if<MSPulse>(&p)) {
            out << "ms species=Be+Mg theta=0 phi=" << format_double(m->drive.ledger.ms_adjust());
        } else if (std::holds_alternative<WaitPulse>(p)) {
            out << "wait species=- theta=0 phi=0";
        } else {
            out << "measure species=Be+Mg theta=0 phi=0";
        }
        out << " dur=" << format_double(pulse_duration(p)) << '\n';
    }
    return out.str();
}

GCalibration GCalibration::nominal(const MSDriveParams &drive) {
    GCalibration c;
    c.drive_hash = drive.parameter_hash();
    return c;
}

void GCalibration::validate() const {
    bool ok = std::isfinite(ms_phase_setting);
    for (int j = 0; j < 2; ++j) {
        ok = ok && std::isfinite(ramsey_phase_corrections[j]) && std::isfinite(stark_shift_compensation[j]);
    }
    if (!ok) throw ConfigError("GCalibration: non-finite phase");
}

namespace detail {

// Ramsey-wrapped MS block with explicit corrections; no staleness check.
void append_ramsey_ms(Sequence &seq, const MSDriveParams &drive, const std::array<double, 2> &corrections,
                      double ms_adjust, const std::array<double, 2> &stark_phase, const IonSystem &system) {
    MSDriveParams d = drive;
    d.ledger.set_ms_adjust(ms_adjust);
    for (int j = 0; j < 2; ++j) d.stark_compensation[j] = stark_phase[j] / d.duration;
    // Be starts on the +1 eigenstate of σ_φ, Mg on −1.
    double first_be = drive.ledger.phi_s(Species::Be) - kPi / 2;
    double first_mg = drive.ledger.phi_s(Species::Mg) + kPi / 2;
    seq.add(laser_pulse(Species::Be, kPi / 2, wrap_phase(first_be), system, d.ledger));
    seq.add(laser_pulse(Species::Mg, kPi / 2, wrap_phase(first_mg), system, d.ledger));
    seq.add(MSPulse{d});
    seq.add(laser_pulse(Species::Be, kPi / 2, wrap_phase(first_be + kPi + corrections[0]), system, d.ledger));
    seq.add(laser_pulse(Species::Mg, kPi / 2, wrap_phase(first_mg + kPi + corrections[1]), system, d.ledger));
}

}  // namespace detail

void append_phase_gate_G(Sequence &seq, const GCalibration &cal, const MSDriveParams &drive,
                         const IonSystem &system) {
    cal.validate();
    if (cal.drive_hash != drive.parameter_hash()) {
        throw StaleCalibration("phase gate: calibration was made for different drive parameters");
    }
    detail::append_ramsey_ms(seq, drive, cal.ramsey_phase_corrections, cal.ms_phase_setting,
                             cal.stark_shift_compensation, system);
}

Sequence build_phase_gate_G(const GCalibration &cal, const MSDriveParams &drive, const IonSystem &system) {
    Sequence seq("phase-gate");
    append_phase_gate_G(seq, cal, drive, system);
    return seq;
}

void append_cnot(Sequence &seq, Species target, const GCalibration &cal, const MSDriveParams &drive,
                 const IonSystem &system) {
    double f = seq.frame[idx(target)];
    seq.add(microwave_pulse(target, kPi / 2, wrap_phase(kPi / 2 - f), system));
    append_phase_gate_G(seq, cal, drive, system);
    seq.add(microwave_pulse(target, kPi / 2, wrap_phase(kPi - f), system));
    seq.frame[0] = wrap_phase(seq.frame[0] + kPi / 2);
    seq.frame[1] = wrap_phase(seq.frame[1] + kPi / 2);
}

Sequence build_cnot(Species target, const GCalibration &cal, const MSDriveParams &drive, const IonSystem &system) {
    Sequence seq(std::string("cnot-target-") + species_name(target));
    append_cnot(seq, target, cal, drive, system);
    return seq;
}

void append_swap(Sequence &seq, const GCalibration &cal, const MSDriveParams &drive, const IonSystem &system) {
    append_cnot(seq, Species::Mg, cal, drive, system);
    append_cnot(seq, Species::Be, cal, drive, system);
    append_cnot(seq, Species::Mg, cal, drive, system);
}

Sequence build_swap(const GCalibration &cal, const MSDriveParams &drive, const IonSystem &system) {
    Sequence seq("swap");
    append_swap(seq, cal, drive, system);
    return seq;
}

const char *variant_name(BellVariant v) { return v == BellVariant::Laser ? "laser" : "microwave"; }

Sequence build_bell(BellVariant variant, const GCalibration &cal, const MSDriveParams &drive,
                    const IonSystem &system, std::optional<std::array<double, 2>> analysis) {
    Sequence seq(std::string("bell-") + variant_name(variant));
    if (variant == BellVariant::Laser) {
        seq.add(MSPulse{drive});
    } else {
        for (Species s : kAllSpecies) seq.add(microwave_pulse(s, kPi / 2, 0, system));
        append_phase_gate_G(seq, cal, drive, system);
        for (Species s : kAllSpecies) seq.add(microwave_pulse(s, kPi / 2, kPi, system));
    }
    if (analysis) {
        for (Species s : kAllSpecies) {
            double phi = wrap_phase((*analysis)[idx(s)]);
            if (variant == BellVariant::Laser) {
                seq.add(laser_pulse(s, kPi / 2, phi, system, drive.ledger));
            } else {
                seq.add(microwave_pulse(s, kPi / 2, phi, system));
            }
        }
        seq.analysis = *analysis;
    }
    seq.measure();
    return seq;
}

const char *variant_name(QLSVariant v) { return v == QLSVariant::Conventional ? "conventional" : "cnot-transfer"; }

Sequence build_qls(QLSVariant variant, double theta, const GCalibration &cal, const MSDriveParams &drive,
                   const IonSystem &system) {
    Sequence seq(std::string("qls-") + variant_name(variant));
    if (variant == QLSVariant::Conventional) {
        seq.add(microwave_pulse(Species::Mg, kPi, 0, system));
        seq.add(microwave_pulse(Species::Be, theta, 0, system));
        seq.add(sideband_pulse(Species::Be, SidebandBranch::Red, kPi, 0, system, drive.ledger));
        seq.add(sideband_pulse(Species::Mg, SidebandBranch::Red, kPi, 0, system, drive.ledger));
    } else {
        seq.add(microwave_pulse(Species::Be, theta, 0, system));
        append_cnot(seq, Species::Mg, cal, drive, system);
    }
    seq.analysis = {theta, 0};
    seq.measure();
    return seq;
}

Sequence build_swap_ramsey(double phi, const GCalibration &cal, const MSDriveParams &drive, const IonSystem &system,
                           double prep_phase) {
    Sequence seq("swap-ramsey");
    seq.add(microwave_pulse(Species::Be, kPi / 2, wrap_phase(prep_phase), system));
    append_swap(seq, cal, drive, system);
    seq.add(microwave_pulse(Species::Mg, kPi / 2, wrap_phase(phi - seq.frame[idx(Species::Mg)]), system));
    seq.analysis = {prep_phase, phi};
    seq.measure();
    return seq;
}

Sequence composite_transfer(Species species, const IonSystem &system) {
    Sequence seq(std::string("composite-transfer-") + species_name(species));
    seq.add(microwave_pulse(species, kPi / 2, 0, system));
    seq.add(microwave_pulse(species, 3 * kPi / 2, kPi / 2, system));
    seq.add(microwave_pulse(species, kPi / 2, 0, system));
    return seq;
}

Sequence plain_transfer(Species species, const IonSystem &system) {
    Sequence seq(std::string("plain-transfer-") + species_name(species));
    seq.add(microwave_pulse(species, kPi, 0, system));
    return seq;
}

RegisterShape InitialEnsemble::shape() const {
    thermal.validate();
    return n_max < 0 ? default_shape(thermal) : RegisterShape(n_max);
}

}  // namespace mixedion
