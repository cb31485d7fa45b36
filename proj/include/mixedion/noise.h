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

#ifndef MIXEDION_NOISE_H
#define MIXEDION_NOISE_H

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "mixedion/dynamics.h"
#include "mixedion/fockspace.h"
#include "mixedion/rng.h"

namespace mixedion {

enum class ScatterChannel { Depolarize, Raman, Rayleigh };
enum class DephasingLaw { Exponential, Gaussian };

const char *channel_name(ScatterChannel c);
const char *law_name(DephasingLaw l);

/// Error budget per gate plus coherence times.
///
/// Scattering and heating entries are Bell-state infidelities contributed by
/// one MS gate; `calibrate_rates` converts them into event rates.
struct NoiseBudget {
    double p_scatter_mg = 6e-3;
    double p_scatter_be = 1e-3;
    double p_heating = 4e-3;
    double spam_error = 5e-3;
    double t2_be = 1.5;   // s
    double t2_mg = 6e-3;  // s
    bool dephasing_be = true;
    bool dephasing_mg = true;
    double path_drift_sigma = 1.0;  // rad, per species per shot
    ScatterChannel channel = ScatterChannel::Depolarize;
    DephasingLaw law = DephasingLaw::Exponential;

    void validate() const;
    bool operator==(const NoiseBudget &) const = default;
    static NoiseBudget none();
    bool is_zero() const;
    double p_scatter(Species s) const { return s == Species::Be ? p_scatter_be : p_scatter_mg; }
};

/// Event rates derived from a budget for one drive.
struct NoiseRates {
    std::array<double, 2> scatter{0, 0};  // events per second of laser-on time
    double heating = 0;                   // phonon-adding jumps per second
    double heating_down = 0;              // phonon-removing jumps per second
};

/// Laser exposure of one sequence; scattering only happens inside these windows.
struct Timeline {
    double duration = 0;
    std::array<std::vector<std::pair<double, double>>, 2> laser_windows;

    double laser_time(Species s) const;
};

struct ScatterEvent {
    double time = 0;
    Species species = Species::Be;
    ScatterChannel type = ScatterChannel::Depolarize;
    int pauli = 0;             // 0 = I, 1 = X, 2 = Y, 3 = Z for depolarizing and Rayleigh events
    double collapse_u = 0;     // Born-rule draw for Raman events
    Level reset = Level::Up;   // final level for Raman events
};

struct HeatingJump {
    double time = 0;
    int direction = +1;
};

/// One shot's noise realization.
struct ShotNoise {
    std::array<double, 2> drift{0, 0};     // rad, added to the optical offset
    std::array<double, 2> detuning{0, 0};  // rad/s, static qubit detuning
    std::array<bool, 2> prep_flip{false, false};
    std::array<bool, 2> detect_flip{false, false};
    std::vector<ScatterEvent> scatters;   // sorted by time
    std::vector<HeatingJump> jumps;       // sorted by time

    bool empty() const;
};

/// Draws one shot's noise from its per-shot streams.
ShotNoise sample_shot(const NoiseBudget &budget, const NoiseRates &rates, const Timeline &timeline,
                      std::uint64_t master_seed, std::uint64_t shot);

/// Applies a scattering event to the qubit of `event.species` in trajectory form.
void apply_scattering(Eigen::VectorXcd &psi, const RegisterShape &shape, const ScatterEvent &event);
QuantumState apply_scattering(const QuantumState &state, const ScatterEvent &event);

/// Normalized a† (direction +1) or a (−1) on the mode. Returns false and
/// leaves the state unchanged when a acts on the vacuum. Throws
/// CutoffTooSmall when a† would push population past n_max.
bool apply_heating_jump(Eigen::VectorXcd &psi, const RegisterShape &shape, int direction);
QuantumState apply_heating_jump(const QuantumState &state, int direction, bool *applied = nullptr);

/// Static detuning for one shot from two uniform draws in [0, 1): Lorentzian
/// (Ramsey decay e^{−t/T2}) or Gaussian (e^{−(t/T2)²}). Both draws are always
/// consumed so the two laws share random numbers.
double dephasing_detuning(DephasingLaw law, double t2, double u1, double u2);

/// Z rotation accumulated by a static detuning drawn from `rng`.
QuantumState dephase_qubit(const QuantumState &state, Species species, double duration, double t2,
                           DephasingLaw law, Rng &rng);

/// Mean Bell infidelity caused by one scattering event at a uniformly random
/// time within one MS gate.
double scatter_event_infidelity(const MSDriveParams &drive, const IonSystem &system, Species species,
                                ScatterChannel channel, int quadrature = 64);

/// Mean Bell infidelity caused by one a† jump at a uniformly random time
/// within one MS gate.
double heating_event_infidelity(const MSDriveParams &drive, const IonSystem &system, int quadrature = 64);

NoiseRates calibrate_rates(const NoiseBudget &budget, const MSDriveParams &drive, const IonSystem &system);

}  // namespace mixedion

#endif
