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

#include <cmath>
#include <sstream>

#include "mixedion/errors.h"
#include "mixedion/sequences.h"
#include "sequences_internal.h"

namespace mixedion {

namespace {

constexpr double kCalibrationThreshold = 1e-4;

MSDriveParams lamb_dicke_twin(const MSDriveParams &drive) {
    MSDriveParams d = drive;
    d.model = CouplingModel::LambDicke;
    return d;
}

std::array<double, 4> ground_populations(const Executor &ex, const Sequence &seq) {
    RegisterShape shape(16);
    QuantumState out = ex.evolve(seq, compose_state(Level::Up, Level::Up, 0, shape));
    return qubit_populations(out);
}

}  // namespace

double maximize_phase(const std::function<double(double)> &f, int grid, double tol) {
    if (grid < 3) throw ConfigError("maximize_phase: grid needs at least 3 points");
    const double h = kTwoPi / grid;
    double best_x = 0, best = f(0);
    for (int k = 1; k < grid; ++k) {
        double v = f(k * h);
        if (v > best + 1e-12) {
            best = v;
            best_x = k * h;
        }
    }
    const double g = (std::sqrt(5.0) - 1) / 2;
    double a = best_x - h, b = best_x + h;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    double x = (a + b) / 2;
    return wrap_phase(f(x) >= best ? x : best_x);
}

namespace {

// Final π/2 phases maximizing P(↑) per species with the drive reduced to its
// Stark shifts and `compensation` applied.
std::array<double, 2> stark_ramsey(const Executor &executor, const MSDriveParams &drive,
                                   const std::array<double, 2> &compensation) {
    MSDriveParams stark = lamb_dicke_twin(drive);
    stark.rabi = {0, 0};
    std::array<double, 2> corrections{0, 0};
    for (Species j : kAllSpecies) {
        auto up_probability = [&](double c) {
            std::array<double, 2> corr{0, 0};
            corr[idx(j)] = c;
            Sequence seq("stark-calibration");
            detail::append_ramsey_ms(seq, stark, corr, 0, compensation, executor.system());
            auto p = ground_populations(executor, seq);
            return j == Species::Be ? p[0] + p[1] : p[0] + p[2];
        };
        corrections[idx(j)] = wrap_signed(maximize_phase(up_probability));
    }
    return corrections;
}

}  // namespace

std::array<double, 2> calibrate_stark(const Executor &executor, const MSDriveParams &drive) {
    return stark_ramsey(executor, drive, {0, 0});
}

GCalibration calibrate_G(const Executor &executor, const MSDriveParams &drive) {
    drive.validate();
    GCalibration cal;
    cal.drive_hash = drive.parameter_hash();
    // The measured Stark phase is removed as a frequency correction during the
    // drive; a second Ramsey pass picks up whatever phase remains.
    cal.stark_shift_compensation = calibrate_stark(executor, drive);
    cal.ramsey_phase_corrections = stark_ramsey(executor, drive, cal.stark_shift_compensation);

    MSDriveParams full = lamb_dicke_twin(drive);
    auto upup = [&](double adjust) {
        Sequence seq("ms-phase-calibration");
        detail::append_ramsey_ms(seq, full, cal.ramsey_phase_corrections, adjust, cal.stark_shift_compensation,
                                 executor.system());
        return ground_populations(executor, seq)[0];
    };
    cal.ms_phase_setting = maximize_phase(upup);
    cal.population = upup(cal.ms_phase_setting);
    if (cal.population < 1 - kCalibrationThreshold) {
        std::ostringstream msg;
        msg << "calibrate_G: best P(up,up) = " << cal.population << " at ms phase " << cal.ms_phase_setting
            << " is below 1 - " << kCalibrationThreshold;
        throw CalibrationFailed(msg.str(), cal);
    }
    return cal;
}

}  // namespace mixedion
