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

#include "qkdmm/keyrate.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qkdmm {

namespace {

constexpr double kFeasibilityEps = 0.0;

double p01_min_three() {
    static const double value = p01_min(3);
    return value;
}

template <typename F>
std::pair<double, double> golden_section_min(const F& f, double a, double b, double width) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > width) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    double x = 0.5 * (a + b);
    return {x, f(x)};
}

double three_plus_upper(const Observables& obs) { return obs.p_01 / (obs.eta.value() * p01_min_three()); }

// Unclamped bounds at pdet2 = u^2 satisfy both consistency conditions.
bool consistent_at(const Observables& obs, double u) {
    DerivedBounds b = derive_bounds(obs, u * u, BoundOptions{.clamp = false});
    double lhs = std::sqrt(obs.eta.value()) * (b.t1_l - 2.0 * b.q1_u);
    return lhs <= b.pdet1_l && b.q2_l <= obs.q;
}

// Numerator of delta_x_l; positivity on the whole segment is the abort test.
double phase_numerator(const Observables& obs, double pdet2) {
    DerivedBounds b = derive_bounds(obs, pdet2);
    return b.t1_l - 2.0 * b.q1_u;
}

}  // namespace

void Observables::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("invalid observables: " + what); };
    if (!(p_det >= 0.0 && p_det <= 1.0)) fail("p_det must lie in [0,1]");
    if (!(p_1 >= 0.0)) fail("p_1 must be nonnegative");
    if (p_1 > p_det) fail("p_1 must not exceed p_det");
    if (!(q >= 0.0)) fail("q must be nonnegative");
    if (!(p_01 >= 0.0)) fail("p_01 must be nonnegative");
    if (p_01 > p_det) fail("p_01 must not exceed p_det");
    if (!(q_z >= 0.0 && q_z <= 1.0)) fail("q_z must lie in [0,1]");
}

std::string to_string(RateStatus status) {
    switch (status) {
        case RateStatus::feasible:
            return "feasible";
        case RateStatus::abort_error_rate:
            return "abort_error_rate";
        case RateStatus::abort_no_single_photon:
            return "abort_no_single_photon";
    }
    return "unknown";
}

DerivedBounds derive_bounds(const Observables& obs, double pdet2, const BoundOptions& opts) {
    if (pdet2 < -1e-12 || pdet2 > obs.p_det + 1e-12) {
        throw std::invalid_argument("derive_bounds: pdet2 must lie in [0, p_det]");
    }
    pdet2 = std::clamp(pdet2, 0.0, std::max(obs.p_det, 0.0));
    const double eta = obs.eta.value();
    const double theta2 = theta(obs.eta, 2);
    const double kappa = 1.0 / eta - 1.0;

    DerivedBounds b;
    b.pdet2 = pdet2;
    b.pdet3plus_u = three_plus_upper(obs);
    b.pdet1_l = obs.p_det - pdet2 - b.pdet3plus_u;

    const double spread = std::sqrt(2.0 * obs.p_01 * pdet2 / (eta * theta2));
    b.p1_2_u = pdet2 / 2.0 + spread;
    if (opts.clamp) {
        b.p1_2_u = std::min(b.p1_2_u, pdet2);
    }
    b.p1_1_l = obs.p_1 - b.p1_2_u - b.pdet3plus_u;
    b.t1_l = opts.literal_t1_sign ? b.pdet1_l - kappa * b.p1_1_l : b.pdet1_l + kappa * b.p1_1_l;

    b.q2_l = (1.0 + theta2) * pdet2 / 4.0 - spread;
    if (opts.clamp) {
        b.q2_l = std::clamp(b.q2_l, 0.0, obs.q);
    }
    b.q1_u = obs.q - b.q2_l;
    b.delta_x_l = b.has_single_photons() ? std::sqrt(eta) * (b.t1_l - 2.0 * b.q1_u) / b.pdet1_l : 0.0;
    return b;
}

double pdet2_upper(const Observables& obs) {
    const double cap = obs.p_det - three_plus_upper(obs);
    if (cap <= 0.0 || !consistent_at(obs, 0.0)) {
        return 0.0;
    }
    double hi = std::sqrt(cap);
    if (consistent_at(obs, hi)) {
        return cap;
    }
    // Both conditions are convex quadratics in u that are <= 0 at u = 0, so
    // the consistent set is an interval [0, u*].
    double lo = 0.0;
    while (hi - lo > 1e-13) {
        double mid = 0.5 * (lo + hi);
        if (consistent_at(obs, mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo * lo;
}

double pdet2_upper_closed_form(const Observables& obs) {
    const double eta = obs.eta.value();
    const double root_eta = std::sqrt(eta);
    const double theta2 = theta(obs.eta, 2);
    const double kappa = 1.0 / eta - 1.0;
    const double p3 = three_plus_upper(obs);
    const double cap = obs.p_det - p3;
    if (cap <= 0.0) {
        return 0.0;
    }
    const double c = std::sqrt(2.0 * obs.p_01 / (eta * theta2));

    // q2_l(u) - q = a u^2 - c u - q.
    const double a = (1.0 + theta2) / 4.0;
    const double u_errors = (c + std::sqrt(c * c + 4.0 * a * obs.q)) / (2.0 * a);

    // sqrt(eta)(t1_l - 2 q1_u) - pdet1_l = r0 + A u^2 - B u.
    const double r0 = (root_eta - 1.0) * cap + root_eta * kappa * (obs.p_1 - p3) - 2.0 * root_eta * obs.q;
    const double quad = (1.0 - root_eta) + root_eta * ((1.0 + theta2) - kappa) / 2.0;
    const double lin = root_eta * c * (kappa + 2.0);
    if (r0 > 0.0) {
        return 0.0;
    }
    double u_delta = std::numeric_limits<double>::infinity();
    if (quad > 0.0) {
        u_delta = (lin + std::sqrt(lin * lin - 4.0 * quad * r0)) / (2.0 * quad);
    }
    const double u = std::min(u_errors, u_delta);
    return std::min(u * u, cap);
}

double phase_objective(const Observables& obs, double pdet2) {
    DerivedBounds b = derive_bounds(obs, pdet2);
    if (!b.has_single_photons()) {
        return 0.0;
    }
    const double delta = std::clamp(b.delta_x_l, -1.0, 1.0);
    return b.pdet1_l * (1.0 - binary_entropy((1.0 - delta) / 2.0));
}

PhaseTermResult minimize_phase_term(const Observables& obs) {
    PhaseTermResult out;
    const double cap = obs.p_det - three_plus_upper(obs);
    if (cap <= 0.0) {
        out.status = RateStatus::abort_no_single_photon;
        return out;
    }
    const double upper = pdet2_upper(obs);
    out.pdet2_upper = upper;

    // t1_l - 2 q1_u is convex in pdet2, so its minimum decides feasibility.
    auto numerator = [&](double d) { return phase_numerator(obs, d); };
    double worst = std::min(numerator(0.0), numerator(upper));
    if (upper > 0.0) {
        worst = std::min(worst, golden_section_min(numerator, 0.0, upper, 1e-10).second);
    }
    if (worst <= kFeasibilityEps) {
        out.status = RateStatus::abort_error_rate;
        return out;
    }

    auto objective = [&](double d) { return phase_objective(obs, d); };
    std::pair<double, double> best{0.0, objective(0.0)};
    if (upper > 0.0) {
        std::pair<double, double> end{upper, objective(upper)};
        std::pair<double, double> inner = golden_section_min(objective, 0.0, upper, 1e-10);
        for (const auto& cand : {end, inner}) {
            if (cand.second < best.second) {
                best = cand;
            }
        }
    }
    out.argmin_pdet2 = best.first;
    out.min_value = best.second;
    return out;
}

KeyRateResult keyrate_multiphoton(const Observables& obs) {
    return keyrate_multiphoton(obs, obs.p_det * binary_entropy(obs.q_z));
}

KeyRateResult keyrate_multiphoton(const Observables& obs, double error_correction) {
    PhaseTermResult phase = minimize_phase_term(obs);
    KeyRateResult out;
    out.status = phase.status;
    out.argmin_pdet2 = phase.argmin_pdet2;
    out.pdet2_upper = phase.pdet2_upper;
    if (phase.status != RateStatus::feasible) {
        return out;
    }
    const double raw = phase.min_value - error_correction;
    out.clamped = raw < 0.0;
    out.k_bound = std::max(raw, 0.0);
    return out;
}

DeltaPair deltas_from_single_obs(double pdet1, double p1_1, double t1, double q1, MismatchEta eta) {
    if (!(pdet1 > 0.0)) {
        throw std::invalid_argument("deltas_from_single_obs: single-photon detection rate must be positive");
    }
    if (p1_1 > pdet1 * (1.0 + 1e-12)) {
        throw std::invalid_argument("deltas_from_single_obs: p1_1 exceeds pdet1");
    }
    return DeltaPair{(pdet1 - 2.0 * p1_1) / pdet1, std::sqrt(eta.value()) * (t1 - 2.0 * q1) / pdet1};
}

double keyrate_single_tight(double p_det, const DeltaPair& deltas) {
    const double norm2 = deltas.delta_x * deltas.delta_x + deltas.delta_z * deltas.delta_z;
    if (norm2 > 1.0 + 1e-10) {
        throw std::domain_error("keyrate_single_tight: delta_x^2 + delta_z^2 exceeds 1");
    }
    const double radius = std::min(std::sqrt(norm2), 1.0);
    const double dz = std::clamp(deltas.delta_z, -1.0, 1.0);
    return p_det * (binary_entropy((1.0 - dz) / 2.0) - binary_entropy((1.0 - radius) / 2.0));
}

double keyrate_single_simple(double p_det, double delta_x) {
    if (std::abs(delta_x) > 1.0 + 1e-10) {
        throw std::domain_error("keyrate_single_simple: |delta_x| exceeds 1");
    }
    const double d = std::clamp(delta_x, -1.0, 1.0);
    return p_det * (1.0 - binary_entropy((1.0 - d) / 2.0));
}

double keyrate_no_mismatch(double p_det, double qber) {
    return std::max(0.0, p_det * (1.0 - 2.0 * binary_entropy(qber)));
}

}  // namespace qkdmm
