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

#ifndef QKDMM_ORACLES_H
#define QKDMM_ORACLES_H

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qkdmm/fock.h"
#include "qkdmm/keyrate.h"

namespace qkdmm {

/// Outcome of one randomized verification suite. Slack is the margin by
/// which the checked inequality held; negative beyond tolerance counts as a
/// violation.
struct TrialReport {
    std::string suite;
    int trials = 0;
    double worst_slack = 0.0;
    int violations = 0;
    std::uint64_t seed = 0;
    int skipped = 0;

    bool passed() const { return violations == 0; }
    /// Folds one checked margin into the report.
    void record(double slack, double tolerance);
};

using Rng = std::mt19937_64;

/// Independent stream for one trial of one suite.
Rng trial_rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream = 0);

/// G G^dag / Tr(G G^dag) with G a dim x rank matrix of complex Gaussians.
Matrix sample_density(int dim, Rng& rng, int rank = -1);

/// Haar-ish unitary close to the identity (Cayley transform of a random
/// Hermitian matrix scaled by eps).
Matrix sample_near_identity_unitary(int dim, double eps, Rng& rng);

/// Mean of the z- and x-basis double-click probabilities for ideal detectors.
double perfect_mean_double_click(const Matrix& rho, int n);

/// Lemma-style double-click bound 2y log2(2^(n-1) - 1) + 2h(y) - (n - 2).
double double_click_slack(int n, double mean_double_click);

TrialReport check_lemma4(int n, int trials, std::uint64_t seed);

/// Map of sector n into (C^2)^(x)n: |n-k, k> -> C(n,k)^(-1/2) sum_{|a|=k} |a>.
Matrix symmetric_embedding(int n);

struct EurEntropies {
    double h_z = 0.0;
    double h_x = 0.0;
};
/// Shannon entropies of the qubit-wise Z and X outcomes of a sector state.
EurEntropies eur_entropies(const Matrix& rho, int n);

TrialReport check_eur(int n, int trials, std::uint64_t seed);

/// h((1 - |delta|)/2) + 1 - h((1 - delta_z)/2).
double single_photon_entropy_bound(double delta_z, double delta_x);

/// Normalized one-photon block whose attenuated conditional states are
/// (1/2)[[1+dz, dx], [dx, 1-dz]] and its Z conjugate.
Matrix extremal_single_photon_block(double delta_z, double delta_x, MismatchEta eta);

/// H(X|B) of a one-photon block after z-basis detection post-selection.
double attenuated_conditional_entropy(const Matrix& block, MismatchEta eta);

/// Applies the joint phase-flip twirl to a one-photon block.
Matrix phase_flip_twirl(const Matrix& block);

TrialReport check_prop3(int trials, std::uint64_t seed);

/// The entropy bound used by the key-rate engine never undercuts the true
/// single-photon H(X|B).
TrialReport check_single_photon_keyrate(int trials, std::uint64_t seed);

/// Two-photon block (1/2)(|+><+| (x) rho_plus + |-><-| (x) rho_minus).
Matrix two_photon_cq_block(const Matrix& rho_plus, const Matrix& rho_minus);

/// q_2 / t_2 for (1/2) I (x) |Phi+><Phi+|.
double bell_error_ratio(MismatchEta eta);

TrialReport check_prop4(int trials, std::uint64_t seed, MismatchEta eta);

/// Midpoint concavity of x h(1/2 - g(x)/x) for random convex quadratics g.
TrialReport check_concavity(int trials, std::uint64_t seed);

/// Midpoint convexity of the key-rate objective on random feasible inputs.
TrialReport check_objective_convexity(int trials, std::uint64_t seed);

/// Empirical minimum of the ideal mean double-click probability on sector n
/// by random restarts and shrinking-step local descent over pure states.
double min_double_click(int n, int iterations, std::uint64_t seed);

TrialReport check_p01min_monotone(int trials, std::uint64_t seed);

/// POVM completeness, basis-change unitarity and the double-click sandwich.
TrialReport check_fock(int trials, std::uint64_t seed);

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"lemma4",    "eur",          "prop3",          "prop4",
                                                   "concavity", "p01min-monotone", "fock"};
    return names;
}

/// Runs a named suite ("all" runs every suite). Throws std::invalid_argument
/// for an unknown name.
std::vector<TrialReport> run_suite(const std::string& name, int trials, std::uint64_t seed);

std::string format_report(const TrialReport& report);
std::string format_report_csv(const std::vector<TrialReport>& reports);

}  // namespace qkdmm

#endif
