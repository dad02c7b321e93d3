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

#include "qkdmm/oracles.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "qkdmm/scalarmath.h"
#include "qkdmm/simulate.h"

namespace qkdmm {

namespace {

double real_trace(const Matrix& a, const Matrix& b) { return (a * b).trace().real(); }

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Matrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    std::normal_distribution<double> normal;
    Matrix g(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            g(i, j) = Complex(normal(rng), normal(rng));
        }
    }
    return g;
}

double shannon(const Eigen::VectorXd& p) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p(i) > 1e-300) s -= p(i) * std::log2(p(i));
    }
    return s;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

TrialReport make_report(const std::string& suite, std::uint64_t seed) {
    TrialReport r;
    r.suite = suite;
    r.seed = seed;
    r.worst_slack = std::numeric_limits<double>::infinity();
    return r;
}

SectorStat sector_stats(const Matrix& block, int n, MismatchEta eta) {
    JointState state;
    for (int m = 0; m < n; ++m) state.blocks.push_back(Matrix::Zero(2 * (m + 1), 2 * (m + 1)));
    state.blocks.push_back(block);
    return observables_from_state(state, eta).sectors[n];
}

Matrix phi_plus_two_photon() {
    Vector v = Vector::Zero(3);
    v(0) = v(2) = 1.0 / std::sqrt(2.0);
    return v * v.adjoint();
}

// Random observables for which the key-rate engine reports a feasible rate.
bool sample_feasible_observables(Rng& rng, Observables& obs) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        obs.eta = MismatchEta(uniform(rng, 0.3, 1.0));
        obs.p_det = uniform(rng, 0.05, 1.0);
        obs.p_1 = obs.p_det * uniform(rng, 0.15, 0.6);
        obs.q = obs.p_det * uniform(rng, 0.0, 0.1);
        obs.p_01 = obs.p_det * std::pow(10.0, uniform(rng, -7.0, -3.0));
        obs.q_z = uniform(rng, 0.0, 0.1);
        if (minimize_phase_term(obs).status == RateStatus::feasible) return true;
    }
    return false;
}

}  // namespace

void TrialReport::record(double slack, double tolerance) {
    if (!(slack >= worst_slack)) worst_slack = slack;
    if (!(slack >= -tolerance)) ++violations;
}

Rng trial_rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                      static_cast<std::uint32_t>(stream)};
    return Rng(seq);
}

Matrix sample_density(int dim, Rng& rng, int rank) {
    if (dim < 1) throw std::invalid_argument("sample_density: dim must be positive");
    if (rank <= 0) rank = dim;
    Matrix g = complex_gaussian(dim, rank, rng);
    Matrix rho = g * g.adjoint();
    return hermitian_part(rho / rho.trace().real());
}

Matrix sample_near_identity_unitary(int dim, double eps, Rng& rng) {
    Matrix g = complex_gaussian(dim, dim, rng);
    Matrix a = eps * hermitian_part(g);
    Matrix id = Matrix::Identity(dim, dim);
    const Complex i(0.0, 1.0);
    return (id + i * a) * (id - i * a).inverse();
}

double perfect_mean_double_click(const Matrix& rho, int n) {
    const MismatchEta ideal(1.0);
    PovmSet z = build_povm(n, ideal, Basis::z, true);
    PovmSet x = build_povm(n, ideal, Basis::x, true);
    return 0.5 * (real_trace(rho, z.double_click) + real_trace(rho, x.double_click));
}

double double_click_slack(int n, double mean_double_click) {
    return double_click_residual(n, std::clamp(mean_double_click, 0.0, 1.0));
}

TrialReport check_lemma4(int n, int trials, std::uint64_t seed) {
    if (n < 3 || n > 6) throw std::invalid_argument("check_lemma4: n must lie in [3, 6]");
    TrialReport rep = make_report("lemma4/n=" + std::to_string(n), seed);
    const double floor = p01_min(n);
    for (int t = 0; t < trials; ++t) {
        Rng rng = trial_rng(seed, t, 100 + n);
        // Alternate mixed and pure states; pure ones reach closer to the bound.
        Matrix rho = sample_density(n + 1, rng, t % 2 == 0 ? n + 1 : 1);
        double y = perfect_mean_double_click(rho, n);
        rep.record(double_click_slack(n, y), 1e-9);
        rep.record(y - floor, 1e-9);
        ++rep.trials;
    }
    return rep;
}

Matrix symmetric_embedding(int n) {
    const int dim = 1 << n;
    Matrix e = Matrix::Zero(dim, n + 1);
    for (int a = 0; a < dim; ++a) {
        int k = std::popcount(static_cast<unsigned>(a));
        e(a, k) = 1.0 / std::sqrt(std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)));
    }
    return e;
}

EurEntropies eur_entropies(const Matrix& rho, int n) {
    const int dim = 1 << n;
    Matrix e = symmetric_embedding(n);
    Matrix hadamard(dim, dim);
    const double scale = std::pow(2.0, -n / 2.0);
    for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < dim; ++b) {
            hadamard(a, b) = (std::popcount(static_cast<unsigned>(a & b)) % 2 ? -scale : scale);
        }
    }
    Matrix vz = e;
    Matrix vx = hadamard * e;
    EurEntropies out;
    out.h_z = shannon((vz * rho * vz.adjoint()).diagonal().real());
    out.h_x = shannon((vx * rho * vx.adjoint()).diagonal().real());
    return out;
}

TrialReport check_eur(int n, int trials, std::uint64_t seed) {
    if (n < 1 || n > 6) throw std::invalid_argument("check_eur: n must lie in [1, 6]");
    TrialReport rep = make_report("eur/n=" + std::to_string(n), seed);
    for (int t = 0; t < trials; ++t) {
        Rng rng = trial_rng(seed, t, 200 + n);
        Matrix rho = sample_density(n + 1, rng, t % 2 == 0 ? n + 1 : 1);
        EurEntropies h = eur_entropies(rho, n);
        rep.record(h.h_z + h.h_x - n, 1e-9);
        ++rep.trials;
    }
    return rep;
}

double single_photon_entropy_bound(double delta_z, double delta_x) {
    const double radius = std::min(std::sqrt(delta_x * delta_x + delta_z * delta_z), 1.0);
    const double dz = std::clamp(delta_z, -1.0, 1.0);
    return binary_entropy((1.0 - radius) / 2.0) + 1.0 - binary_entropy((1.0 - dz) / 2.0);
}

Matrix phase_flip_twirl(const Matrix& block) {
    Eigen::Vector4cd signs(1.0, -1.0, -1.0, 1.0);
    Matrix flipped = signs.asDiagonal() * block * signs.asDiagonal();
    return 0.5 * (block + flipped);
}

Matrix extremal_single_photon_block(double delta_z, double delta_x, MismatchEta eta) {
    Matrix plus_state(2, 2);
    plus_state << 1.0 + delta_z, delta_x, delta_x, 1.0 - delta_z;
    plus_state *= 0.5;
    Eigen::Vector2cd z(1.0, -1.0);
    Matrix minus_state = z.asDiagonal() * plus_state * z.asDiagonal();
    Matrix attenuated =
        0.5 * (kron_alice(alice_x_projector(true), plus_state) + kron_alice(alice_x_projector(false), minus_state));
    Eigen::Vector2cd inv_g(1.0, 1.0 / std::sqrt(eta.value()));
    Matrix undo = kron_alice(Eigen::Matrix2cd::Identity(), inv_g.asDiagonal().toDenseMatrix());
    Matrix rho = undo * attenuated * undo;
    return rho / rho.trace().real();
}

double attenuated_conditional_entropy(const Matrix& block, MismatchEta eta) {
    Matrix g = kron_alice(Eigen::Matrix2cd::Identity(), attenuation_operator(1, eta));
    Matrix sigma = g * block * g;
    sigma /= sigma.trace().real();
    return conditional_entropy_xb(measure_alice_x(hermitian_part(sigma)), 2);
}

TrialReport check_prop3(int trials, std::uint64_t seed) {
    TrialReport rep = make_report("prop3", seed);
    for (int t = 0; t < trials; ++t) {
        Rng rng = trial_rng(seed, t, 300);
        MismatchEta eta(uniform(rng, 0.2, 1.0));
        Matrix rho = sample_density(4, rng, t % 3 == 0 ? 1 : 4);
        if (t % 2 == 1) rho = phase_flip_twirl(rho);
        SectorStat s = sector_stats(rho, 1, eta);
        ++rep.trials;
        if (s.p_det < 1e-12) {
            ++rep.skipped;
            continue;
        }
        DeltaPair d = deltas_from_single_obs(s.p_det, s.p_1, s.t, s.q, eta);
        rep.record(single_photon_entropy_bound(d.delta_z, d.delta_x) - attenuated_conditional_entropy(rho, eta), 1e-8);
    }
    // Extremal family on a 9x9 grid: observables recover the parameters and
    // the bound is attained.
    const double etas[] = {0.4, 0.7, 1.0};
    for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
            MismatchEta eta(etas[(i + j) % 3]);
            const double dz = -1.0 + 2.0 * i / 8.0;
            const double dx = (-1.0 + 2.0 * j / 8.0) * std::sqrt(std::max(0.0, 1.0 - dz * dz));
            Matrix rho = extremal_single_photon_block(dz, dx, eta);
            SectorStat s = sector_stats(rho, 1, eta);
            DeltaPair d = deltas_from_single_obs(s.p_det, s.p_1, s.t, s.q, eta);
            rep.record(-std::abs(d.delta_z - dz) - std::abs(d.delta_x - dx), 1e-8);
            double gap = single_photon_entropy_bound(dz, dx) - attenuated_conditional_entropy(rho, eta);
            rep.record(-std::abs(gap), 1e-8);
            ++rep.trials;
        }
    }
    return rep;
}

TrialReport check_single_photon_keyrate(int trials, std::uint64_t seed) {
    TrialReport rep = make_report("prop3/keyrate", seed);
    for (int t = 0; t < trials; ++t) {
        Rng rng = trial_rng(seed, t, 350);
        MismatchEta eta(uniform(rng, 0.2, 1.0));
        Matrix rho = sample_density(4, rng, t % 3 == 0 ? 1 : 4);
        JointState state;
        state.blocks = {Matrix::Zero(2, 2), rho};
        Observables obs = observables_from_state(state, eta).obs;
        DerivedBounds b = derive_bounds(obs, 0.0);
        ++rep.trials;
        if (!b.has_single_photons()) {
            ++rep.skipped;
            continue;
        }
        const double delta = std::clamp(b.delta_x_l, -1.0, 1.0);
        rep.record(binary_entropy((1.0 - delta) / 2.0) - attenuated_conditional_entropy(rho, eta), 1e-8);
    }
    return rep;
}

Matrix two_photon_cq_block(const Matrix& rho_plus, const Matrix& rho_minus) {
    return 0.5 * (kron_alice(alice_x_projector(true), rho_plus) + kron_alice(alice_x_projector(false), rho_minus));
}

double bell_error_ratio(MismatchEta eta) {
    Matrix phi = phi_plus_two_photon();
    SectorStat s = sector_stats(two_photon_cq_block(phi, phi), 2, eta);
    return s.q / s.t;
}

TrialReport check_prop4(int trials, std::uint64_t seed, MismatchEta eta) {
    std::ostringstream name;
    name << "prop4/eta=" << format_number(eta.value(), 4);
    TrialReport rep = make_report(name.str(), seed);
    const double e = eta.value();
    const double theta2 = theta(eta, 2);
    const Matrix phi = phi_plus_two_photon();
    for (int t = 0; t < trials; ++t) {
        Rng rng = trial_rng(seed, t, 400 + static_cast<std::uint64_t>(std::lround(e * 1000)));
        const double eps = std::pow(10.0, uniform(rng, -7.0, 0.0));
        Matrix rho_plus, rho_minus;
        switch (t % 3) {
            case 0:
                rho_plus = sample_density(3, rng);
                rho_minus = sample_density(3, rng);
                break;
            case 1:
                rho_plus = (1.0 - eps) * phi + eps * sample_density(3, rng);
                rho_minus = (1.0 - eps) * phi + eps * sample_density(3, rng);
                break;
            default: {
                // Unitary perturbations keep the state pure near the extremum.
                Matrix u = sample_near_identity_unitary(3, eps, rng);
                Matrix v = sample_near_identity_unitary(3, eps, rng);
                rho_plus = u * phi * u.adjoint();
                rho_minus = v * phi * v.adjoint();
                break;
            }
        }
        SectorStat s = sector_stats(two_photon_cq_block(rho_plus, rho_minus), 2, eta);
        ++rep.trials;
        if (s.t < 1e-14) {
            ++rep.skipped;
            continue;
        }
        const double spread = std::sqrt(2.0 * s.p_01 / (e * s.t));
        rep.record(s.q / s.t - ((1.0 + theta2) / 4.0 - spread), 1e-9);
        rep.record((theta2 / 2.0 + spread) - s.p_1 / s.t, 1e-9);
        const double final_spread = std::sqrt(2.0 * s.p_01 * s.p_det / (e * theta2));
        rep.record(s.q - ((1.0 + theta2) * s.p_det / 4.0 - final_spread), 1e-9);
        rep.record((s.p_det / 2.0 + final_spread) - s.p_1, 1e-9);
    }
    return rep;
}

TrialReport check_concavity(int trials, std::uint64_t seed) {
    TrialReport rep = make_report("concavity", seed);
    for (int t = 0; t < trials; ++t) {
        Rng rng = trial_rng(seed, t, 500);
        ++rep.trials;
        double lo = 0.0, hi = 0.0, a = 0.0, b = 0.0, c = 0.0;
        bool found = false;
        for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
            lo = uniform(rng, 0.01, 0.9);
            hi = lo + uniform(rng, 0.01, 1.0 - lo);
            a = uniform(rng, 0.0, 1.0);
            b = uniform(rng, -0.5, 0.5);
            c = uniform(rng, -0.05, 0.05);
            // g(x)/x = a x + b + c/x; its extrema sit at the ends or at sqrt(c/a).
            auto ratio = [&](double x) { return a * x + b + c / x; };
            std::vector<double> probes = {lo, hi};
            if (a > 0.0 && c > 0.0) {
                double x = std::sqrt(c / a);
                if (x > lo && x < hi) probes.push_back(x);
            }
            found = std::all_of(probes.begin(), probes.end(), [&](double x) {
                double r = ratio(x);
                return r >= 0.0 && r <= 0.5;
            });
        }
        if (!found) {
            ++rep.skipped;
            continue;
        }
        auto f = [&](double x) {
            double arg = std::clamp(0.5 - (a * x + b + c / x), 0.0, 1.0);
            return x * binary_entropy(arg);
        };
        for (int k = 0; k < 50; ++k) {
            double x = uniform(rng, lo, hi);
            double y = uniform(rng, lo, hi);
            rep.record(f(0.5 * (x + y)) - 0.5 * (f(x) + f(y)), 1e-10);
        }
    }
    return rep;
}

TrialReport check_objective_convexity(int trials, std::uint64_t seed) {
    TrialReport rep = make_report("concavity/objective", seed);
    for (int t = 0; t < trials; ++t) {
        Rng rng = trial_rng(seed, t, 550);
        Observables obs;
        ++rep.trials;
        if (!sample_feasible_observables(rng, obs)) {
            ++rep.skipped;
            continue;
        }
        const double upper = pdet2_upper(obs);
        if (upper <= 0.0) {
            ++rep.skipped;
            continue;
        }
        for (int k = 0; k < 50; ++k) {
            double x = uniform(rng, 0.0, upper);
            double y = uniform(rng, 0.0, upper);
            double mid = phase_objective(obs, 0.5 * (x + y));
            rep.record(0.5 * (phase_objective(obs, x) + phase_objective(obs, y)) - mid, 1e-10);
        }
    }
    return rep;
}

double min_double_click(int n, int iterations, std::uint64_t seed) {
    if (n < 3 || n > 5) throw std::invalid_argument("min_double_click: n must lie in [3, 5]");
    const MismatchEta ideal(1.0);
    Matrix op = 0.5 * (build_povm(n, ideal, Basis::z, true).double_click +
                       build_povm(n, ideal, Basis::x, true).double_click);
    auto value = [&](const Vector& v) { return (v.adjoint() * op * v)(0, 0).real(); };
    const int restarts = 8;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        Rng rng = trial_rng(seed, r, 600 + n);
        Vector psi;
        if (r == 0) {
            psi = Vector::Zero(n + 1);
            psi(0) = 1.0;  // |n, 0>_z
        } else {
            psi = complex_gaussian(n + 1, 1, rng).col(0).normalized();
        }
        double current = value(psi);
        double step = 0.5;
        for (int it = 0; it < iterations; ++it) {
            Vector cand = (psi + step * complex_gaussian(n + 1, 1, rng).col(0)).normalized();
            double v = value(cand);
            if (v < current) {
                psi = cand;
                current = v;
                step = std::min(step * 1.2, 1.0);
            } else {
                step = std::max(step * 0.95, 1e-8);
            }
        }
        best = std::min(best, current);
    }
    return best;
}

TrialReport check_p01min_monotone(int trials, std::uint64_t seed) {
    TrialReport rep = make_report("p01min-monotone", seed);
    double previous = 0.0;
    for (int n = 3; n <= 12; ++n) {
        double root = p01_min(n);
        rep.record(-std::abs(double_click_residual(n, root)), 1e-10);
        if (n > 3) rep.record(root - previous, 0.0);
        previous = root;
        // Strict growth of the defining function on (0, 1/2).
        double last = double_click_residual(n, 1e-6);
        for (int k = 1; k <= 200; ++k) {
            double y = 1e-6 + (0.5 - 2e-6) * k / 200.0;
            double cur = double_click_residual(n, y);
            rep.record(cur > last ? cur - last : -1.0, 0.0);
            last = cur;
        }
        ++rep.trials;
    }
    const int iterations = std::max(trials, 200);
    for (int n = 3; n <= 5; ++n) {
        rep.record(min_double_click(n, iterations, seed) - p01_min(n), 1e-6);
        ++rep.trials;
    }
    return rep;
}

TrialReport check_fock(int trials, std::uint64_t seed) {
    TrialReport rep = make_report("fock", seed);
    const double etas[] = {0.3, 0.7, 1.0};
    const double tol = 1e-12;
    for (int n = 1; n <= 6; ++n) {
        Matrix u = basis_change(n);
        Matrix id = Matrix::Identity(n + 1, n + 1);
        rep.record(-max_abs(u * u.adjoint() - id), tol);
        rep.record(-max_abs(u * u - id), tol);
        for (double e : etas) {
            MismatchEta eta(e);
            Matrix g = attenuation_operator(n, eta);
            rep.record(-max_abs(g * g - (id - build_povm(n, eta, Basis::z).none)), tol);
            for (Basis basis : {Basis::z, Basis::x}) {
                PovmSet p = build_povm(n, eta, basis);
                PovmSet ideal = build_povm(n, eta, basis, true);
                rep.record(-max_abs(p.none + p.click0 + p.click1 + p.double_click - id), tol);
                for (const Matrix* m : {&p.none, &p.click0, &p.click1, &p.double_click}) {
                    rep.record(hermitian_eigenvalues(*m).minCoeff(), tol);
                }
                for (int t = 0; t < trials; ++t) {
                    Rng rng = trial_rng(seed, t, 700 + 10 * n + static_cast<std::uint64_t>(basis == Basis::x));
                    Matrix rho = sample_density(n + 1, rng, t % 2 == 0 ? n + 1 : 1);
                    double total = real_trace(rho, p.none) + real_trace(rho, p.click0) + real_trace(rho, p.click1) +
                                   real_trace(rho, p.double_click);
                    rep.record(-std::abs(total - 1.0), tol);
                    double imperfect = real_trace(rho, p.double_click);
                    double perfect = real_trace(rho, ideal.double_click);
                    rep.record(perfect - imperfect, tol);
                    rep.record(imperfect - e * perfect, tol);
                    ++rep.trials;
                }
            }
        }
    }
    return rep;
}

std::vector<TrialReport> run_suite(const std::string& name, int trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("trials must be positive");
    std::vector<TrialReport> out;
    auto want = [&](const std::string& s) { return name == "all" || name == s; };
    bool known = name == "all";
    for (const std::string& s : suite_names()) known = known || s == name;
    if (!known) throw std::invalid_argument("unknown suite '" + name + "'");

    if (want("lemma4")) {
        for (int n = 3; n <= 6; ++n) out.push_back(check_lemma4(n, trials, seed));
    }
    if (want("eur")) {
        for (int n = 1; n <= 6; ++n) out.push_back(check_eur(n, trials, seed));
    }
    if (want("prop3")) {
        out.push_back(check_prop3(trials, seed));
        out.push_back(check_single_photon_keyrate(trials, seed));
    }
    if (want("prop4")) {
        for (double e : {0.5, 0.9, 1.0}) out.push_back(check_prop4(trials, seed, MismatchEta(e)));
    }
    if (want("concavity")) {
        out.push_back(check_concavity(trials, seed));
        out.push_back(check_objective_convexity(trials, seed));
    }
    if (want("p01min-monotone")) out.push_back(check_p01min_monotone(trials, seed));
    if (want("fock")) out.push_back(check_fock(trials, seed));
    return out;
}

std::string format_report(const TrialReport& r) {
    std::ostringstream os;
    os << r.suite << ": " << (r.passed() ? "ok" : "VIOLATED") << " trials=" << r.trials
       << " violations=" << r.violations << " skipped=" << r.skipped
       << " worst_slack=" << format_number(r.worst_slack, 6) << " seed=" << r.seed;
    return os.str();
}

std::string format_report_csv(const std::vector<TrialReport>& reports) {
    std::ostringstream os;
    os << "suite,trials,violations,skipped,worst_slack,seed\n";
    for (const TrialReport& r : reports) {
        os << r.suite << ',' << r.trials << ',' << r.violations << ',' << r.skipped << ','
           << format_number(r.worst_slack) << ',' << r.seed << '\n';
    }
    return os.str();
}

}  // namespace qkdmm
