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

#ifndef MIXEDION_FOCKSPACE_H
#define MIXEDION_FOCKSPACE_H

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace mixedion {

using cplx = std::complex<double>;
using SpinVector = Eigen::Vector4cd;
using SpinMatrix = Eigen::Matrix4cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2 * kPi;

enum class Species : int { Be = 0, Mg = 1 };
enum class Level : int { Up = 0, Down = 1 };

inline constexpr std::array<Species, 2> kAllSpecies{Species::Be, Species::Mg};

inline int idx(Species s) { return static_cast<int>(s); }
const char *species_name(Species s);

/// Joint spin index with Be as the most significant qubit:
/// 0 = ↑↑, 1 = ↑↓, 2 = ↓↑, 3 = ↓↓.
constexpr int spin_index(Level be, Level mg) {
    return 2 * static_cast<int>(be) + static_cast<int>(mg);
}

/// Level of `species` within joint spin index `spin`.
constexpr Level level_of(int spin, Species species) {
    return static_cast<Level>(species == Species::Be ? (spin >> 1) & 1 : spin & 1);
}

/// Two qubits (Be, Mg) times one harmonic mode truncated at n_max.
///
/// Amplitude layout is spin-major: index = spin_index * (n_max + 1) + n.
class RegisterShape {
   public:
    explicit RegisterShape(int n_max);

    int n_max() const { return n_max_; }
    int fock_dim() const { return n_max_ + 1; }
    int dim() const { return 4 * (n_max_ + 1); }
    int index(int spin, int n) const { return spin * (n_max_ + 1) + n; }
    int index(Level be, Level mg, int n) const { return index(spin_index(be, mg), n); }

    bool operator==(const RegisterShape &) const = default;

   private:
    int n_max_;
};

/// Normalized pure state of the register.
class QuantumState {
   public:
    /// Throws ShapeMismatch on a wrong length and std::invalid_argument when
    /// the squared norm differs from 1 by more than 1e-9.
    QuantumState(RegisterShape shape, Eigen::VectorXcd amplitudes);

    /// Rescales to unit norm; throws on a zero vector.
    static QuantumState normalized(RegisterShape shape, Eigen::VectorXcd amplitudes);

    /// spins ⊗ |n⟩.
    static QuantumState product(const SpinVector &spins, int n, RegisterShape shape);

    const RegisterShape &shape() const { return shape_; }
    const Eigen::VectorXcd &amplitudes() const { return amps_; }
    cplx amplitude(int spin, int n) const { return amps_(shape_.index(spin, n)); }

    /// Population of Fock level n traced over spins.
    double fock_population(int n) const;
    double mean_phonon_number() const;

   private:
    RegisterShape shape_;
    Eigen::VectorXcd amps_;
};

struct ThermalSpec {
    double nbar = 0.0;
    double tail_tol = 1e-4;

    void validate() const;
    bool operator==(const ThermalSpec &) const = default;
};

struct FockWeight {
    int n;
    double weight;
};

/// Geometric occupation distribution n̄ⁿ/(n̄+1)ⁿ⁺¹ truncated at shape.n_max()
/// and renormalized. Throws CutoffTooSmall when the discarded tail mass is
/// not below spec.tail_tol or the renormalized mean misses n̄ by more than
/// tail_tol·(n̄+1).
std::vector<FockWeight> thermal_weights(const ThermalSpec &spec, const RegisterShape &shape);

/// Smallest n_max accepted by thermal_weights.
int thermal_cutoff(const ThermalSpec &spec);

/// Default register for a thermal spec: n_max = max(⌈10(n̄+1)⌉, thermal_cutoff + 15).
RegisterShape default_shape(const ThermalSpec &spec);

QuantumState compose_state(Level be, Level mg, int n, const RegisterShape &shape);

/// |⟨a|b⟩|².
double fidelity(const QuantumState &a, const QuantumState &b);
/// Uhlmann fidelity (tr √(√ρ σ √ρ))².
double fidelity(const SpinMatrix &rho, const SpinMatrix &sigma);
/// ⟨ψ|ρ|ψ⟩.
double fidelity(const SpinMatrix &rho, const SpinVector &psi);

/// (P↑↑, P↑↓, P↓↑, P↓↓) traced over the mode.
std::array<double, 4> qubit_populations(const QuantumState &state);

/// Two-qubit density matrix after tracing out the mode.
SpinMatrix reduced_qubit_density(const QuantumState &state);

/// Single-qubit reduced density matrix of `species`.
Eigen::Matrix2cd single_qubit_density(const SpinMatrix &rho, Species species);

SpinVector phi_plus();

/// Fidelity to (|↑↑⟩ + e^{iβ}|↓↓⟩)/√2 maximized over β, i.e. to Φ₊ up to
/// local Z phases: (ρ↑↑,↑↑ + ρ↓↓,↓↓)/2 + |ρ↑↑,↓↓|.
double bell_fidelity_local_frame(const SpinMatrix &rho);

/// ½‖ρ − σ‖₁.
double trace_distance(const SpinMatrix &rho, const SpinMatrix &sigma);

double purity(const Eigen::MatrixXcd &rho);

}  // namespace mixedion

#endif
