// Copyright 2026 The qkdmm Authors
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

#ifndef QKDMM_FOCK_H
#define QKDMM_FOCK_H

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qkdmm/scalarmath.h"

namespace qkdmm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Basis { z, x };

/*
 * Conventions for the n-photon sector of the two-mode Fock space.
 *
 * The sector has dimension n + 1. Index j stands for the occupation state
 * |n - j, j>_b: j photons in mode 1 (the "bit 1" mode) and n - j photons in
 * mode 0. With this ordering the one-photon sector is the qubit with |0> at
 * index 0 and |1> at index 1, and |0, n>_z (all photons at the weaker
 * detector) is the last index.
 *
 * Joint Alice-Bob blocks are laid out Alice-major: row a * (n + 1) + j, with
 * Alice's qubit expressed in her z basis.
 */

/// Occupation-number density block for one photon number.
struct SectorState {
    int n = 0;
    Basis basis = Basis::z;
    Matrix rho;

    /// Throws std::invalid_argument unless rho is (n+1)x(n+1), Hermitian to
    /// 1e-12, PSD to -1e-10 and has trace in [0, 1 + 1e-10].
    void validate() const;
};

/// The four click outcomes of a two-detector measurement in one basis.
struct PovmSet {
    int n = 0;
    Basis basis = Basis::z;
    Matrix none;
    Matrix click0;
    Matrix click1;
    Matrix double_click;
};

/// Block-diagonal Alice-Bob state: blocks[n] acts on C^2 (x) sector n and has
/// size 2(n+1). Missing photon numbers are represented by zero blocks.
struct JointState {
    std::vector<Matrix> blocks;

    int max_photons() const { return static_cast<int>(blocks.size()) - 1; }
    double trace() const;
    void validate() const;
};

/// Matrix with entry (j, k) = <n-j, j|_z |n-k, k>_x.
Matrix basis_change(int n);

/// Detector POVM on sector n measured in `basis`. With perfect = true the
/// weaker detector is treated as ideal (eta -> 1).
PovmSet build_povm(int n, MismatchEta eta, Basis basis, bool perfect = false);

/// Square root of the z-basis detection operator on sector n:
/// I - (1 - sqrt(theta_n)) |0,n><0,n|.
Matrix attenuation_operator(int n, MismatchEta eta);

/// Dimension of the Fock space truncated at max_photons (all sectors
/// 0..max_photons stacked in order).
int truncated_fock_dim(int max_photons);

/// Offset of sector n inside the truncated Fock space.
int sector_offset(int n);

/// Pinches a state on C^2 (x) truncated Fock space onto blocks of fixed total
/// photon number. The layout is Alice-major with Bob's index running over the
/// stacked sectors.
Matrix decohere_photon_number(const Matrix& rho, int max_photons);

/// Embeds a block-diagonal joint state into the truncated full space.
Matrix embed_joint_state(const JointState& state);

/// Hermitian part of m.
Matrix hermitian_part(const Matrix& m);

/// Eigenvalues of a Hermitian matrix, ascending.
Eigen::VectorXd hermitian_eigenvalues(const Matrix& m);

/// Base-2 von Neumann entropy; eigenvalues below 1e-14 count as zero.
double von_neumann_entropy(const Matrix& rho);

/// Partial trace over the first factor of C^dim_a (x) C^(rows/dim_a).
Matrix trace_out_first(const Matrix& rho, int dim_a);

/// Partial trace over the second factor, returning a dim_a x dim_a matrix.
Matrix trace_out_second(const Matrix& rho, int dim_a);

/// alice (x) bob for a 2x2 operator on Alice's qubit (z basis).
Matrix kron_alice(const Eigen::Matrix2cd& alice, const Matrix& bob);

/// |+><+| or |-><-| on Alice's qubit, in her z basis.
Eigen::Matrix2cd alice_x_projector(bool plus);

/// Alice measures her qubit in the x basis (dephasing in |+>, |->).
Matrix measure_alice_x(const Matrix& rho_ab);

/// H(X|B) = S(rho_XB) - S(rho_B) for a state on C^dim_x (x) B. The input
/// must be Hermitian PSD with unit trace (to 1e-10).
double conditional_entropy_xb(const Matrix& rho_xb, int dim_x = 2);

}  // namespace qkdmm

#endif
