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

#include <Eigen/Eigenvalues>

#include "mixedion/dynamics.h"
#include "mixedion/errors.h"

namespace mixedion {

MSEvolver::MSEvolver(const MSDriveParams &drive, const std::array<SpeciesParams, 2> &species,
                     const RegisterShape &shape)
    : shape_(shape), delta_(drive.delta), duration_(drive.duration) {
    drive.validate();
    MSDriveParams bare = drive;
    bare.ledger = drive.ledger.without_optical_offsets();
    MSHamiltonianParts parts = ms_hamiltonian_parts(bare, species, shape);
    Eigen::MatrixXcd k = parts.at(0);
    for (int s = 0; s < 4; ++s) {
        for (int n = 0; n <= shape.n_max(); ++n) {
            k(shape.index(s, n), shape.index(s, n)) += delta_ * n;
        }
    }
    // The drive conserves the parity of n + (number of ↓ spins).
    for (int s = 0; s < 4; ++s) {
        int downs = (s & 1) + ((s >> 1) & 1);
        for (int n = 0; n <= shape.n_max(); ++n) {
            blocks_[(n + downs) & 1].indices.push_back(shape.index(s, n));
        }
    }
    for (Block &b : blocks_) {
        const int m = static_cast<int>(b.indices.size());
        Eigen::MatrixXcd sub(m, m);
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) {
                sub(r, c) = k(b.indices[r], b.indices[c]);
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sub);
        if (eig.info() != Eigen::Success) throw ConvergenceError("MSEvolver: eigendecomposition failed");
        b.vectors = eig.eigenvectors();
        b.values = eig.eigenvalues();
    }
}

void MSEvolver::evolve(Eigen::VectorXcd &psi, double t0, double t1, const std::array<double, 2> &optical) const {
    if (psi.size() != shape_.dim()) throw ShapeMismatch("MSEvolver: state has wrong dimension");
    const int fd = shape_.fock_dim();
    // Spin-diagonal frame for the optical offsets.
    std::array<cplx, 4> z;
    for (int s = 0; s < 4; ++s) {
        double a = 0;
        for (Species j : kAllSpecies) {
            a += (level_of(s, j) == Level::Up ? 0.5 : -0.5) * optical[idx(j)];
        }
        z[s] = std::polar(1.0, a);
    }
    const double tau = t1 - t0;
    for (const Block &b : blocks_) {
        const int m = static_cast<int>(b.indices.size());
        Eigen::VectorXcd x(m);
        for (int r = 0; r < m; ++r) {
            int i = b.indices[r];
            int s = i / fd, n = i % fd;
            x(r) = psi(i) * std::conj(z[s]) * std::polar(1.0, -delta_ * t0 * n);
        }
        Eigen::VectorXcd y = b.vectors.adjoint() * x;
        for (int r = 0; r < m; ++r) {
            y(r) *= std::polar(1.0, -b.values(r) * tau);
        }
        x.noalias() = b.vectors * y;
        for (int r = 0; r < m; ++r) {
            int i = b.indices[r];
            int s = i / fd, n = i % fd;
            psi(i) = x(r) * z[s] * std::polar(1.0, delta_ * t1 * n);
        }
    }
}

}  // namespace mixedion
