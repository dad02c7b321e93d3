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

#include "qkdmm/fock.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qkdmm {

namespace {

double log_factorial(int k) { return std::lgamma(k + 1.0); }

double binomial(int n, int k) {
    if (k < 0 || k > n) {
        return 0.0;
    }
    return std::round(std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k)));
}

void require_square(const Matrix& m, Eigen::Index dim, const char* what) {
    if (m.rows() != dim || m.cols() != dim) {
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(dim) + "x" +
                                    std::to_string(dim) + " matrix, got " + std::to_string(m.rows()) +
                                    "x" + std::to_string(m.cols()));
    }
}

void require_hermitian_psd(const Matrix& m, const char* what) {
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
    }
    if (m.rows() > 0 && hermitian_eigenvalues(m)(0) < -1e-10) {
        throw std::invalid_argument(std::string(what) + ": matrix is not positive semidefinite");
    }
}

Matrix diagonal_matrix(const Eigen::VectorXd& d) {
    return d.cast<Complex>().asDiagonal();
}

}  // namespace

void SectorState::validate() const {
    if (n < 0) {
        throw std::invalid_argument("SectorState: negative photon number");
    }
    require_square(rho, n + 1, "SectorState");
    require_hermitian_psd(rho, "SectorState");
    double tr = rho.trace().real();
    if (tr < -1e-10 || tr > 1.0 + 1e-10) {
        throw std::invalid_argument("SectorState: trace out of [0,1]: " + std::to_string(tr));
    }
}

double JointState::trace() const {
    double tr = 0.0;
    for (const auto& b : blocks) {
        if (b.size() > 0) {
            tr += b.trace().real();
        }
    }
    return tr;
}

void JointState::validate() const {
    for (size_t n = 0; n < blocks.size(); ++n) {
        if (blocks[n].size() == 0) {
            continue;
        }
        require_square(blocks[n], 2 * (static_cast<Eigen::Index>(n) + 1), "JointState block");
        require_hermitian_psd(blocks[n], "JointState block");
    }
    if (trace() > 1.0 + 1e-10) {
        throw std::invalid_argument("JointState: total trace exceeds 1");
    }
}

Matrix basis_change(int n) {
    if (n < 0) {
        throw std::invalid_argument("basis_change: negative photon number");
    }
    // |n-k, k>_x = (a+ + b+)^(n-k) (a+ - b+)^k / sqrt((n-k)! k! 2^n) |vac>,
    // expanded binomially and projected on |n-j, j>_z.
    Matrix u = Matrix::Zero(n + 1, n + 1);
    for (int k = 0; k <= n; ++k) {
        for (int j = 0; j <= n; ++j) {
            double sum = 0.0;
            for (int i = 0; i <= n - k; ++i) {
                int l = j - i;
                if (l < 0 || l > k) {
                    continue;
                }
                sum += binomial(n - k, i) * binomial(k, l) * ((l % 2) ? -1.0 : 1.0);
            }
            double norm = std::exp(0.5 * (log_factorial(j) + log_factorial(n - j) - log_factorial(k) -
                                          log_factorial(n - k)) -
                                   0.5 * n * std::log(2.0));
            u(j, k) = norm * sum;
        }
    }
    return u;
}

PovmSet build_povm(int n, MismatchEta eta, Basis basis, bool perfect) {
    if (n < 0) {
        throw std::invalid_argument("build_povm: negative photon number");
    }
    double loss = perfect ? 0.0 : 1.0 - eta.value();
    Eigen::VectorXd none = Eigen::VectorXd::Zero(n + 1);
    Eigen::VectorXd click0 = Eigen::VectorXd::Zero(n + 1);
    Eigen::VectorXd click1 = Eigen::VectorXd::Zero(n + 1);
    Eigen::VectorXd both = Eigen::VectorXd::Zero(n + 1);
    for (int j = 0; j <= n; ++j) {
        // j photons reach the weaker detector; each is missed with prob. 1 - eta.
        double all_missed = std::pow(loss, j);
        if (j == n) {
            none(j) = all_missed;
            click1(j) = 1.0 - all_missed;
        } else {
            click0(j) = all_missed;
            both(j) = 1.0 - all_missed;
        }
    }
    PovmSet povm{n, basis, diagonal_matrix(none), diagonal_matrix(click0), diagonal_matrix(click1),
                 diagonal_matrix(both)};
    if (basis == Basis::x) {
        Matrix u = basis_change(n);
        for (Matrix* m : {&povm.none, &povm.click0, &povm.click1, &povm.double_click}) {
            *m = u * (*m) * u.adjoint();
        }
    }
    return povm;
}

Matrix attenuation_operator(int n, MismatchEta eta) {
    if (n < 0) {
        throw std::invalid_argument("attenuation_operator: negative photon number");
    }
    Matrix g = Matrix::Identity(n + 1, n + 1);
    g(n, n) = std::sqrt(theta(eta, n));
    return g;
}

int truncated_fock_dim(int max_photons) { return (max_photons + 1) * (max_photons + 2) / 2; }

int sector_offset(int n) { return n * (n + 1) / 2; }

Matrix decohere_photon_number(const Matrix& rho, int max_photons) {
    const int d = truncated_fock_dim(max_photons);
    require_square(rho, 2 * d, "decohere_photon_number");
    std::vector<int> photons(2 * d);
    for (int a = 0; a < 2; ++a) {
        for (int n = 0; n <= max_photons; ++n) {
            for (int j = 0; j <= n; ++j) {
                photons[a * d + sector_offset(n) + j] = n;
            }
        }
    }
    Matrix out = Matrix::Zero(2 * d, 2 * d);
    for (int r = 0; r < 2 * d; ++r) {
        for (int c = 0; c < 2 * d; ++c) {
            if (photons[r] == photons[c]) {
                out(r, c) = rho(r, c);
            }
        }
    }
    return out;
}

Matrix embed_joint_state(const JointState& state) {
    const int max_n = state.max_photons();
    const int d = truncated_fock_dim(max_n);
    Matrix full = Matrix::Zero(2 * d, 2 * d);
    for (int n = 0; n <= max_n; ++n) {
        const Matrix& block = state.blocks[n];
        if (block.size() == 0) {
            continue;
        }
        const int s = n + 1;
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                full.block(a * d + sector_offset(n), b * d + sector_offset(n), s, s) =
                    block.block(a * s, b * s, s, s);
            }
        }
    }
    return full;
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

double von_neumann_entropy(const Matrix& rho) {
    double s = 0.0;
    for (double lambda : hermitian_eigenvalues(rho)) {
        if (lambda > 1e-14) {
            s -= lambda * std::log2(lambda);
        }
    }
    return s;
}

Matrix trace_out_first(const Matrix& rho, int dim_a) {
    const Eigen::Index dim_b = rho.rows() / dim_a;
    Matrix out = Matrix::Zero(dim_b, dim_b);
    for (int a = 0; a < dim_a; ++a) {
        out += rho.block(a * dim_b, a * dim_b, dim_b, dim_b);
    }
    return out;
}

Matrix trace_out_second(const Matrix& rho, int dim_a) {
    const Eigen::Index dim_b = rho.rows() / dim_a;
    Matrix out(dim_a, dim_a);
    for (int a = 0; a < dim_a; ++a) {
        for (int b = 0; b < dim_a; ++b) {
            out(a, b) = rho.block(a * dim_b, b * dim_b, dim_b, dim_b).trace();
        }
    }
    return out;
}

Matrix kron_alice(const Eigen::Matrix2cd& alice, const Matrix& bob) {
    const Eigen::Index d = bob.rows();
    Matrix out(2 * d, 2 * d);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            out.block(a * d, b * d, d, d) = alice(a, b) * bob;
        }
    }
    return out;
}

Eigen::Matrix2cd alice_x_projector(bool plus) {
    const double off = plus ? 0.5 : -0.5;
    Eigen::Matrix2cd p;
    p << 0.5, off, off, 0.5;
    return p;
}

Matrix measure_alice_x(const Matrix& rho_ab) {
    const Eigen::Index dim_b = rho_ab.rows() / 2;
    const Matrix id = Matrix::Identity(dim_b, dim_b);
    Matrix out = Matrix::Zero(rho_ab.rows(), rho_ab.cols());
    for (bool plus : {true, false}) {
        Matrix p = kron_alice(alice_x_projector(plus), id);
        out += p * rho_ab * p;
    }
    return out;
}

double conditional_entropy_xb(const Matrix& rho_xb, int dim_x) {
    if (rho_xb.rows() % dim_x != 0 || rho_xb.rows() != rho_xb.cols()) {
        throw std::invalid_argument("conditional_entropy_xb: dimension mismatch");
    }
    double tr = rho_xb.trace().real();
    if (std::abs(tr - 1.0) > 1e-10) {
        throw std::invalid_argument("conditional_entropy_xb: state is not normalized, trace " +
                                    std::to_string(tr));
    }
    require_hermitian_psd(rho_xb, "conditional_entropy_xb");
    return von_neumann_entropy(rho_xb) - von_neumann_entropy(trace_out_first(rho_xb, dim_x));
}

}  // namespace qkdmm
