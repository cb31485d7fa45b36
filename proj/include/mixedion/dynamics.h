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

#ifndef MIXEDION_DYNAMICS_H
#define MIXEDION_DYNAMICS_H

#include <array>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "mixedion/fockspace.h"

namespace mixedion {

/// How sideband matrix elements depend on the Fock number.
///
/// LambDicke keeps the leading order in η (couplings ∝ √n). ExactLaguerre uses
/// the full Debye-Waller/Laguerre expression and is normalized so that the
/// n = 0 ↔ 1 coupling equals the nominal sideband Rabi rate.
enum class CouplingModel { LambDicke, ExactLaguerre };
enum class ModeLabel { InPhase, OutOfPhase };
enum class SidebandBranch { Red, Blue };

const char *model_name(CouplingModel m);

struct SpeciesParams {
    Species label = Species::Be;
    double mass = 0;            // kg
    double carrier_rabi = 0;    // rad/s, laser carrier Ω₀
    double eta = 0;             // Lamb-Dicke parameter on the simulated mode
    double microwave_rabi = 0;  // rad/s

    void validate() const;
};

struct ModeParams {
    double omega_z = 0;       // rad/s
    double heating_rate = 0;  // quanta/s
    ModeLabel label = ModeLabel::InPhase;

    void validate() const;
};

/// In-phase axial mode at 2π × 2.5 MHz.
ModeParams default_mode();
/// Species with η on the in-phase mode; carrier Rabi rates are filled in by
/// `system_for_drive`.
SpeciesParams default_beryllium();
SpeciesParams default_magnesium();

/// Everything the pulse builders and executor need to know about the ions.
struct IonSystem {
    std::array<SpeciesParams, 2> species{default_beryllium(), default_magnesium()};
    ModeParams mode = default_mode();
    CouplingModel model = CouplingModel::LambDicke;

    const SpeciesParams &operator[](Species s) const { return species[idx(s)]; }
    SpeciesParams &operator[](Species s) { return species[idx(s)]; }
    void validate() const;
};

/// Wraps to [0, 2π).
double wrap_phase(double phi);
/// Wraps to (-π, π].
double wrap_signed(double phi);

/// Optical phases of the sideband drives.
///
/// Per species the ledger stores the red/blue sideband phases set by the
/// modulators (including static Δk·X₀ terms). An optical offset (beam path
/// plus per-shot drift) is common to every laser field addressing one species,
/// including its laser carrier. `ms_rf_offset` is an unknown phase of the
/// bichromatic drive relative to the carrier reference and `ms_adjust` the
/// correction applied by calibration; both enter φ_r and φ_b of both species.
class PhaseLedger {
   public:
    void set_sideband_phases(Species s, double phi_r, double phi_b);
    double phi_r(Species s) const { return phi_r_[idx(s)]; }
    double phi_b(Species s) const { return phi_b_[idx(s)]; }

    void set_path_offset(Species s, double phi) { path_[idx(s)] = wrap_phase(phi); }
    double path_offset(Species s) const { return path_[idx(s)]; }
    void set_drift(Species s, double phi) { drift_[idx(s)] = wrap_phase(phi); }
    double drift(Species s) const { return drift_[idx(s)]; }

    void set_ms_rf_offset(double phi) { rf_offset_ = wrap_phase(phi); }
    double ms_rf_offset() const { return rf_offset_; }
    void set_ms_adjust(double phi) { adjust_ = wrap_phase(phi); }
    double ms_adjust() const { return adjust_; }

    /// Path offset plus drift: the phase shared by all laser fields on `s`.
    double optical_offset(Species s) const { return path_[idx(s)] + drift_[idx(s)]; }

    /// φ_M = (φ_r − φ_b)/2 from the modulator phases. Optical offsets cancel.
    double phi_m(Species s) const { return (phi_r_[idx(s)] - phi_b_[idx(s)]) / 2; }
    /// φ_S = (φ_r + φ_b)/2 from the modulator phases only.
    double phi_s(Species s) const { return (phi_r_[idx(s)] + phi_b_[idx(s)]) / 2; }

    double effective_phi_r(Species s) const;
    double effective_phi_b(Species s) const;
    double effective_phi_s(Species s) const { return (effective_phi_r(s) + effective_phi_b(s)) / 2; }
    double effective_phi_m(Species s) const { return phi_m(s); }

    /// Copy with path offsets and drifts zeroed.
    PhaseLedger without_optical_offsets() const;

   private:
    std::array<double, 2> phi_r_{0, 0};
    std::array<double, 2> phi_b_{0, 0};
    std::array<double, 2> path_{0, 0};
    std::array<double, 2> drift_{0, 0};
    double rf_offset_ = 0;
    double adjust_ = 0;
};

struct MSDriveParams {
    std::array<double, 2> rabi{0, 0};  // Ω_j, rad/s
    double delta = 0;                  // rad/s
    double duration = 0;               // s
    PhaseLedger ledger;
    CouplingModel model = CouplingModel::LambDicke;
    /// AC Stark shift of |↑⟩ per species while the drive is on, rad/s.
    std::array<double, 2> stark_shift{0, 0};
    /// Frequency correction of |↑⟩ per species applied by calibration, rad/s.
    std::array<double, 2> stark_compensation{0, 0};
    bool spectator_enabled = false;
    /// Off-resonant spectator shift of |↑⟩ per species, rad/s.
    std::array<double, 2> spectator{0, 0};

    void validate() const;
    /// Hash of the parameters a phase calibration depends on. Optical offsets,
    /// the calibration's own adjustments and the coupling model are excluded.
    std::uint64_t parameter_hash() const;
};

/// δ = 2π/t_MS, Ω = δ/4 on both species, Δφ_M = 0: the same-parity and
/// opposite-parity geometric phases differ by π/2 after one loop.
MSDriveParams gate_condition_drive(double t_ms, CouplingModel model = CouplingModel::LambDicke);

/// Fills carrier_rabi with Ω_j/η_j so laser carriers match the drive strength.
IonSystem system_for_drive(const MSDriveParams &drive, IonSystem base = {});

/// Coupling between Fock levels n and n + step (step = ±1) for a sideband of
/// carrier Rabi rate omega0.
///
/// ExactLaguerre: Ω₀ e^{−η²/2} η L¹_m(η²)/√(m+1) with m = min(n, n+step).
/// LambDicke: Ω₀ η √(m+1).
double sideband_coupling(int n, int step, double eta, double omega0,
                         CouplingModel model = CouplingModel::ExactLaguerre);

/// Rotation by θ about (cos φ, −sin φ, 0) in the (↑, ↓) basis.
/// (π, 0) maps ↑ → −i↓.
Eigen::Matrix2cd carrier_unitary(double theta, double phi);

/// (Ω₀/2)(e^{iφ}σ⁺ + e^{−iφ}σ⁻) + (Δ/2)σ_z; driving for θ/Ω₀ at Δ = 0 gives
/// carrier_unitary(θ, φ).
Eigen::Matrix2cd carrier_hamiltonian(double omega0, double phi, double detuning = 0);

/// exp(−iHt) for a Hermitian 2×2 H.
Eigen::Matrix2cd evolve_two_level(const Eigen::Matrix2cd &h, double t);

/// MS Hamiltonian split as H(t) = e^{−iδt}L + e^{iδt}L† + D, where L holds
/// every term that lowers the phonon number and D the diagonal shifts.
struct MSHamiltonianParts {
    Eigen::SparseMatrix<cplx> lower;
    Eigen::VectorXd diagonal;
    double delta = 0;

    Eigen::MatrixXcd at(double t) const;
};

MSHamiltonianParts ms_hamiltonian_parts(const MSDriveParams &drive, const std::array<SpeciesParams, 2> &species,
                                        const RegisterShape &shape);

/// Dense interaction-frame MS Hamiltonian at time t.
Eigen::MatrixXcd ms_hamiltonian(const MSDriveParams &drive, const std::array<SpeciesParams, 2> &species,
                                const RegisterShape &shape, double t);

/// Sum of sparse operators with time-dependent scalar coefficients.
class TimeDependentHamiltonian {
   public:
    void add_term(Eigen::SparseMatrix<cplx> op, std::function<cplx(double)> coeff);
    void add_diagonal(Eigen::VectorXd diag);
    int dim() const { return dim_; }
    /// y = H(t) x
    void apply(double t, const Eigen::VectorXcd &x, Eigen::VectorXcd &y) const;

    static TimeDependentHamiltonian from_ms(const MSHamiltonianParts &parts);

   private:
    struct Term {
        Eigen::SparseMatrix<cplx> op;
        std::function<cplx(double)> coeff;
    };
    std::vector<Term> terms_;
    Eigen::VectorXd diag_;
    int dim_ = -1;
};

struct StepPolicy {
    double max_step = 0;  // s; 0 means duration / min_steps
    int min_steps = 16;
    int max_steps = 1 << 22;
    /// Convergence: ‖ψ(N steps) − ψ(2N steps)‖ below this.
    double tol = 1e-8;
};

/// Step policy for one MS loop: step ≤ (2π/δ)/200.
StepPolicy ms_step_policy(double delta);

struct PropagationResult {
    Eigen::VectorXcd psi;
    int steps = 0;
    double richardson_diff = 0;
};

/// Fixed-step RK4 with step doubling until two successive results agree.
/// Throws ConvergenceError if max_steps is exceeded.
PropagationResult propagate_vector(const Eigen::VectorXcd &psi0, const TimeDependentHamiltonian &h,
                                   double duration, const StepPolicy &policy);

QuantumState propagate(const QuantumState &state, const TimeDependentHamiltonian &h, double duration,
                       const StepPolicy &policy);
QuantumState propagate(const QuantumState &state, const std::function<Eigen::MatrixXcd(double)> &h,
                       double duration, const StepPolicy &policy);

/// Same-parity and opposite-parity geometric phases after t = 2π/δ:
/// (8πΩ²/δ²)cos²(Δφ_M/2) and (8πΩ²/δ²)sin²(Δφ_M/2).
std::pair<double, double> geometric_phase(double omega, double delta, double dphi_m);

/// Forced-oscillator solution for one σ_φ branch with eigenvalues (s_Be, s_Mg).
struct MSBranch {
    cplx force;    // Σ_j Ω_j s_j e^{iφ_M,j}
    cplx alpha;    // displacement at t
    double phase;  // accumulated phase at t
};
MSBranch ms_branch(const MSDriveParams &drive, int s_be, int s_mg, double t);

/// Eigenvector of σ_φ for `species` with eigenvalue s = ±1 in the (↑, ↓) basis.
Eigen::Vector2cd sigma_phi_eigenvector(double phi_s, int s);

/// Displacement operator restricted to Fock levels 0..n_max.
Eigen::MatrixXcd displacement_matrix(cplx alpha, int n_max);

/// Closed-form Lamb-Dicke MS evolution to time t. Throws ConfigError for the
/// ExactLaguerre model or when diagonal shifts are set.
QuantumState ms_analytic(const MSDriveParams &drive, double t, const QuantumState &initial);

/// Diagonal |↑⟩ shift of `species` while the drive is on; zero when disabled.
double spectator_shift(const MSDriveParams &drive, Species species);

/// Exact MS propagation through a rotating frame in which the Hamiltonian is
/// time independent: ψ(t) = e^{iδtN} e^{−iKt} ψ(0) with K = H(0) + δN. The
/// eigendecomposition of K is computed once; optical offsets enter as a
/// spin-diagonal similarity transform, so they never require a rebuild.
class MSEvolver {
   public:
    MSEvolver(const MSDriveParams &drive, const std::array<SpeciesParams, 2> &species, const RegisterShape &shape);

    /// Evolves ψ in place from pulse time t0 to t1 with the given per-species
    /// optical offsets (rad).
    void evolve(Eigen::VectorXcd &psi, double t0, double t1, const std::array<double, 2> &optical) const;

    const RegisterShape &shape() const { return shape_; }
    double duration() const { return duration_; }

   private:
    struct Block {
        std::vector<int> indices;
        Eigen::MatrixXcd vectors;
        Eigen::VectorXd values;
    };
    RegisterShape shape_;
    double delta_;
    double duration_;
    std::array<Block, 2> blocks_;
};

/// Populates and evolves a resonant sideband pulse exactly (each coupled pair
/// is an independent two-level system). `detuning` adds (Δ/2)σ_z on the
/// addressed qubit; `omega0` is the carrier Rabi rate of the addressed species.
void apply_sideband(Eigen::VectorXcd &psi, const RegisterShape &shape, Species species, SidebandBranch branch,
                    double phi, double omega0, double eta, CouplingModel model, double duration,
                    double detuning = 0);

/// Ground-state-calibrated duration of a sideband pulse of area θ.
double sideband_duration(double theta, double omega0, double eta, CouplingModel model);

/// Applies a 2×2 operator to one qubit of the register.
void apply_single_qubit(Eigen::VectorXcd &psi, const RegisterShape &shape, Species species,
                        const Eigen::Matrix2cd &u);

/// exp(−i(Δ/2)σ_z t) on one qubit.
void apply_z_phase(Eigen::VectorXcd &psi, const RegisterShape &shape, Species species, double angle);

}  // namespace mixedion

#endif
