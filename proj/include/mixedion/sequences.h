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

#ifndef MIXEDION_SEQUENCES_H
#define MIXEDION_SEQUENCES_H

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mixedion/dynamics.h"
#include "mixedion/fockspace.h"
#include "mixedion/noise.h"
#include "mixedion/readout.h"

namespace mixedion {

enum class Source { Laser, Microwave };

/// Single-qubit rotation R(θ, φ). Laser pulses carry the optical offset of
/// their species from the ledger; microwave pulses have none.
struct CarrierPulse {
    Species species = Species::Be;
    double theta = 0;
    double phi = 0;
    Source source = Source::Microwave;
    double rabi = 0;      // rad/s
    double duration = 0;  // s
    double ledger_offset = 0;
};

struct SidebandPulse {
    Species species = Species::Be;
    SidebandBranch branch = SidebandBranch::Red;
    double theta = 0;
    double phi = 0;
    double omega0 = 0;  // carrier Rabi rate of the species
    double eta = 0;
    CouplingModel model = CouplingModel::ExactLaguerre;
    double duration = 0;  // from the n = 0 ↔ 1 coupling
    double ledger_offset = 0;
};

struct MSPulse {
    MSDriveParams drive;
};

struct WaitPulse {
    double duration = 0;
};

struct MeasurePulse {};

using Pulse = std::variant<CarrierPulse, SidebandPulse, MSPulse, WaitPulse, MeasurePulse>;

double pulse_duration(const Pulse &p);

CarrierPulse microwave_pulse(Species s, double theta, double phi, const IonSystem &system);
CarrierPulse laser_pulse(Species s, double theta, double phi, const IonSystem &system, const PhaseLedger &ledger);
SidebandPulse sideband_pulse(Species s, SidebandBranch branch, double theta, double phi, const IonSystem &system,
                             const PhaseLedger &ledger);

/// Ordered pulse program.
///
/// `frame` tracks virtual Z rotations left behind by gate constructions: the
/// physical state equals Rz(frame) applied to the ideal one, with
/// Rz(α) = diag(e^{−iα/2}, e^{iα/2}). Builders emit later microwave phases
/// relative to this frame.
class Sequence {
   public:
    explicit Sequence(std::string name = "") : name_(std::move(name)) {}

    /// Throws ConfigError for θ < 0 or when a pulse follows Measure.
    Sequence &add(Pulse p);
    Sequence &measure() { return add(MeasurePulse{}); }

    const std::string &name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }
    const std::vector<Pulse> &pulses() const { return pulses_; }
    double duration() const;
    bool measured() const;
    Timeline timeline() const;

    std::array<double, 2> frame{0, 0};
    /// Analysis phases (Be, Mg) copied into shot records.
    std::array<double, 2> analysis{0, 0};

   private:
    std::string name_;
    std::vector<Pulse> pulses_;
};

/// One pulse per line: `<index> <variant> species=<..> theta=<rad> phi=<rad> dur=<s>`.
std::string to_string(const Sequence &seq);

struct GCalibration {
    std::array<double, 2> ramsey_phase_corrections{0, 0};
    /// Stark phase correction per species, spread uniformly over the drive.
    std::array<double, 2> stark_shift_compensation{0, 0};
    double ms_phase_setting = 0;
    std::uint64_t drive_hash = 0;
    double population = 0;  // P(↑↑) after Ĝ on |↑↑⟩ at the calibrated setting

    /// Zero corrections bound to `drive`; exact when there are no Stark shifts
    /// and no rf offset.
    static GCalibration nominal(const MSDriveParams &drive);
    void validate() const;
};

class CalibrationFailed : public std::runtime_error {
   public:
    CalibrationFailed(const std::string &what, GCalibration best) : std::runtime_error(what), best(best) {}
    GCalibration best;
};

/// Laser π/2 pair, MS drive, laser π/2 pair: diag(1, i, i, 1) on (↑↑, ↑↓, ↓↑, ↓↓).
/// Throws StaleCalibration when `cal` was made for different drive parameters.
Sequence build_phase_gate_G(const GCalibration &cal, const MSDriveParams &drive, const IonSystem &system);
void append_phase_gate_G(Sequence &seq, const GCalibration &cal, const MSDriveParams &drive,
                         const IonSystem &system);

/// Microwave π/2 pulses on `target` around Ĝ. Flips the target when the
/// control is ↓; leaves Rz(π/2) on both qubits in the frame.
Sequence build_cnot(Species target, const GCalibration &cal, const MSDriveParams &drive, const IonSystem &system);
void append_cnot(Sequence &seq, Species target, const GCalibration &cal, const MSDriveParams &drive,
                 const IonSystem &system);

/// CNOT(target Mg), CNOT(target Be), CNOT(target Mg).
Sequence build_swap(const GCalibration &cal, const MSDriveParams &drive, const IonSystem &system);
void append_swap(Sequence &seq, const GCalibration &cal, const MSDriveParams &drive, const IonSystem &system);

enum class BellVariant { Laser, Microwave };
const char *variant_name(BellVariant v);

/// Laser: bare MS drive. Microwave: microwave π/2 on both, Ĝ, microwave π/2
/// on both with the phase advanced by π. With `analysis` set, π/2 analysis
/// pulses with phases (Be, Mg) follow (laser carriers for the laser variant);
/// the sequence always ends in Measure.
Sequence build_bell(BellVariant variant, const GCalibration &cal, const MSDriveParams &drive,
                    const IonSystem &system, std::optional<std::array<double, 2>> analysis = std::nullopt);

enum class QLSVariant { Conventional, CnotTransfer };
const char *variant_name(QLSVariant v);

/// Be Rabi flop by θ followed by transfer of the Be state onto Mg.
///
/// Conventional: Mg prepared in ↓ by a microwave π pulse, then red sideband π
/// pulses on Be and on Mg calibrated for n = 0; Mg ends in ↓ when Be was ↓.
/// CnotTransfer: CNOT with Mg as target.
Sequence build_qls(QLSVariant variant, double theta, const GCalibration &cal, const MSDriveParams &drive,
                   const IonSystem &system);

/// Microwave π/2 on Be (phase prep_phase), SWAP, microwave (π/2, φ) on Mg, measure.
Sequence build_swap_ramsey(double phi, const GCalibration &cal, const MSDriveParams &drive, const IonSystem &system,
                           double prep_phase = 0);

/// Microwave (π/2, 0), (3π/2, π/2), (π/2, 0).
Sequence composite_transfer(Species species, const IonSystem &system);
/// Microwave (π, 0).
Sequence plain_transfer(Species species, const IonSystem &system);

struct InitialEnsemble {
    ThermalSpec thermal;
    int n_max = -1;  // −1 selects default_shape(thermal)
    Level be = Level::Up;
    Level mg = Level::Up;

    RegisterShape shape() const;
};

/// Runs sequences on the simulated register.
///
/// Noise rates are calibrated once against `reference_drive`. MS propagators
/// are cached per drive and register size, so repeated shots only pay for
/// matrix-vector products.
class Executor {
   public:
    Executor(IonSystem system, const MSDriveParams &reference_drive, NoiseBudget budget = NoiseBudget::none(),
             DetectorModel detector = {}, int threads = 1);

    const IonSystem &system() const { return system_; }
    const NoiseBudget &budget() const { return budget_; }
    const NoiseRates &rates() const { return rates_; }
    const DetectorModel &detector() const { return detector_; }
    int threads() const { return threads_; }

    /// One record per shot, ordered by shot index; deterministic in
    /// (seed, first_shot + i) regardless of the thread count.
    std::vector<ShotRecord> execute(const Sequence &seq, const InitialEnsemble &ensemble, long shots,
                                    std::uint64_t seed, std::uint64_t first_shot = 0) const;

    /// Pulse-by-pulse evolution; measurement pulses are skipped.
    void evolve(const Sequence &seq, Eigen::VectorXcd &psi, const RegisterShape &shape,
                const ShotNoise *noise = nullptr, std::uint32_t *flags = nullptr) const;
    QuantumState evolve(const Sequence &seq, const QuantumState &state) const;

    /// Noiseless reduced qubit state averaged exactly over the thermal weights.
    SpinMatrix thermal_density(const Sequence &seq, const InitialEnsemble &ensemble) const;
    std::array<double, 4> thermal_populations(const Sequence &seq, const InitialEnsemble &ensemble) const;

   private:
    std::shared_ptr<const MSEvolver> evolver(const MSDriveParams &drive, const RegisterShape &shape) const;
    ShotRecord run_shot(const Sequence &seq, const InitialEnsemble &ensemble, const RegisterShape &shape,
                        const std::vector<FockWeight> &weights, const Timeline &timeline, std::uint64_t seed,
                        std::uint64_t shot) const;

    IonSystem system_;
    NoiseBudget budget_;
    DetectorModel detector_;
    NoiseRates rates_;
    int threads_;
    mutable std::mutex cache_mu_;
    mutable std::map<std::pair<std::uint64_t, int>, std::shared_ptr<const MSEvolver>> cache_;
};

/// Ramsey-phase and MS-phase search for Ĝ.
///
/// Step 1 drives only the Stark shifts and tunes each species' final π/2
/// phase. That phase becomes `stark_shift_compensation`, applied as a
/// frequency correction while the drive is on, and a second Ramsey pass sets
/// `ramsey_phase_corrections`. Step 2 runs the full drive and tunes the MS
/// phase setting. Each
/// search is a 64-point grid followed by golden-section refinement. Phases do
/// not depend on the coupling model, so the search runs on the Lamb-Dicke
/// form of the drive. Throws CalibrationFailed when P(↑↑) stays below
/// 1 − 1e-4.
GCalibration calibrate_G(const Executor &executor, const MSDriveParams &drive);

/// Step 1 alone: final-phase corrections that undo the Stark phases.
std::array<double, 2> calibrate_stark(const Executor &executor, const MSDriveParams &drive);

/// Phase maximizing f on [0, 2π): grid then golden section.
double maximize_phase(const std::function<double(double)> &f, int grid = 64, double tol = 1e-7);

}  // namespace mixedion

#endif
