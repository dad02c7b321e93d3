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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace qkdmm;

namespace {

Observables make_obs(double eta, double p_det, double p_1, double q, double p_01, double q_z) {
    Observables o;
    o.eta = MismatchEta(eta);
    o.p_det = p_det;
    o.p_1 = p_1;
    o.q = q;
    o.p_01 = p_01;
    o.q_z = q_z;
    return o;
}

Observables reference_obs() { return make_obs(1.0, 1.0, 0.5, 0.05, 1e-5, 0.05); }

Observables depolarized(double eta, double qber, double p01) {
    return make_obs(eta, (1 + eta) / 2, eta / 2, qber, p01, qber);
}

double ref_h(double x) {
    if (x <= 0 || x >= 1) return 0;
    return -x * std::log2(x) - (1 - x) * std::log2(1 - x);
}

// Item-by-item recomputation of the bound chain, kept deliberately plain.
struct RefPoint {
    double pdet1;
    double delta;  // unclamped
    double q2_raw;
};

RefPoint ref_point(const Observables& o, double d, bool clamp) {
    const double e = o.eta.value();
    const double th2 = 1 - (1 - e) * (1 - e);
    const double p3 = o.p_01 / (e * p01_min(3));
    const double pdet1 = o.p_det - d - p3;
    const double root = std::sqrt(2 * o.p_01 * d / (e * th2));
    double p12 = d / 2 + root;
    double q2 = (1 + th2) * d / 4 - root;
    const double q2_raw = q2;
    if (clamp) {
        p12 = std::min(p12, d);
        q2 = std::min(std::max(q2, 0.0), o.q);
    }
    const double p11 = o.p_1 - p12 - p3;
    const double t1 = pdet1 + (1 / e - 1) * p11;
    const double q1 = o.q - q2;
    return {pdet1, std::sqrt(e) * (t1 - 2 * q1) / pdet1, q2_raw};
}

double ref_upper(const Observables& o, int steps) {
    const double cap = o.p_det - o.p_01 / (o.eta.value() * p01_min(3));
    double last_ok = 0;
    for (int k = 0; k <= steps; ++k) {
        double d = cap * k / steps;
        RefPoint r = ref_point(o, d, false);
        if (r.delta <= 1 && r.q2_raw <= o.q) {
            last_ok = d;
        } else {
            break;
        }
    }
    return last_ok;
}

double ref_min_objective(const Observables& o, double upper, int steps) {
    double best = 1e300;
    for (int k = 0; k <= steps; ++k) {
        double d = upper * k / steps;
        RefPoint r = ref_point(o, d, true);
        double delta = std::min(r.delta, 1.0);
        best = std::min(best, r.pdet1 * (1 - ref_h((1 - delta) / 2)));
    }
    return best;
}

}  // namespace

TEST(observables, validation) {
    EXPECT_NO_THROW(reference_obs().validate());
    EXPECT_THROW(make_obs(1, 0.5, 0.6, 0, 0, 0).validate(), std::invalid_argument);
    EXPECT_THROW(make_obs(1, 0.5, 0.1, 0, 0.6, 0).validate(), std::invalid_argument);
    EXPECT_THROW(make_obs(1, 0.5, 0.1, -0.1, 0, 0).validate(), std::invalid_argument);
    EXPECT_THROW(make_obs(1, 1.5, 0.1, 0, 0, 0).validate(), std::invalid_argument);
    EXPECT_THROW(make_obs(1, 0.5, 0.1, 0, 0, 1.5).validate(), std::invalid_argument);
}

TEST(derive_bounds, reference_point) {
    DerivedBounds b = derive_bounds(reference_obs(), 0.0);
    const double p3 = 1e-5 / p01_min(3);
    EXPECT_NEAR(b.pdet3plus_u, p3, 1e-15);
    EXPECT_NEAR(b.pdet1_l, 1 - p3, 1e-15);
    EXPECT_NEAR(b.pdet1_l, 0.999864, 5e-6);
    EXPECT_DOUBLE_EQ(b.q1_u, 0.05);
    EXPECT_NEAR(b.delta_x_l, 0.9, 2e-5);
    EXPECT_NEAR(b.delta_x_l, (b.pdet1_l - 0.1) / b.pdet1_l, 1e-14);
}

TEST(derive_bounds, zero_two_photon_rate) {
    for (double e : {0.3, 0.8, 1.0}) {
        DerivedBounds b = derive_bounds(depolarized(e, 0.03, 1e-4), 0.0);
        EXPECT_EQ(b.p1_2_u, 0.0);
        EXPECT_EQ(b.q2_l, 0.0);
    }
}

TEST(derive_bounds, no_double_clicks) {
    Observables o = make_obs(1.0, 0.8, 0.4, 0.07, 0.0, 0.05);
    DerivedBounds b = derive_bounds(o, 0.0);
    EXPECT_EQ(b.pdet3plus_u, 0.0);
    EXPECT_NEAR(b.delta_x_l, (0.8 - 0.14) / 0.8, 1e-15);
}

TEST(derive_bounds, matches_reference_chain) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 200; ++t) {
        Observables o = depolarized(0.3 + 0.7 * u(rng), 0.1 * u(rng), 1e-6 + 1e-3 * u(rng));
        double d = o.p_det * 0.3 * u(rng);
        DerivedBounds b = derive_bounds(o, d);
        RefPoint r = ref_point(o, d, true);
        EXPECT_NEAR(b.pdet1_l, r.pdet1, 1e-14);
        EXPECT_NEAR(b.delta_x_l, r.delta, 1e-12);
    }
}

TEST(derive_bounds, clamps_only_tighten) {
    Observables o = depolarized(0.7, 0.05, 1e-3);
    for (double d : {1e-6, 1e-4, 1e-2, 0.1}) {
        DerivedBounds c = derive_bounds(o, d);
        DerivedBounds r = derive_bounds(o, d, BoundOptions{.clamp = false});
        EXPECT_LE(c.p1_2_u, r.p1_2_u);
        EXPECT_LE(c.p1_2_u, d);
        EXPECT_GE(c.q2_l, 0.0);
        EXPECT_LE(c.q2_l, o.q);
        EXPECT_GE(c.delta_x_l, r.delta_x_l - 1e-15);
    }
}

TEST(derive_bounds, literal_sign_variant) {
    Observables o = depolarized(0.6, 0.05, 1e-5);
    DerivedBounds plus = derive_bounds(o, 0.01);
    DerivedBounds minus = derive_bounds(o, 0.01, BoundOptions{.literal_t1_sign = true});
    const double kappa = 1 / 0.6 - 1;
    EXPECT_NEAR(plus.t1_l - minus.t1_l, 2 * kappa * plus.p1_1_l, 1e-14);
    Observables ideal = depolarized(1.0, 0.05, 1e-5);
    EXPECT_EQ(derive_bounds(ideal, 0.01).t1_l, derive_bounds(ideal, 0.01, BoundOptions{.literal_t1_sign = true}).t1_l);
}

TEST(derive_bounds, rejects_out_of_range) {
    EXPECT_THROW(derive_bounds(reference_obs(), -0.1), std::invalid_argument);
    EXPECT_THROW(derive_bounds(reference_obs(), 1.5), std::invalid_argument);
}

TEST(pdet2_upper, solvers_agree) {
    Observables o = reference_obs();
    double bis = pdet2_upper(o);
    EXPECT_GT(bis, 0.0);
    EXPECT_LT(bis, 1.0);
    EXPECT_NEAR(bis, pdet2_upper_closed_form(o), 1e-9);
    EXPECT_NEAR(bis, ref_upper(o, 1000000), 2e-6);

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 300; ++t) {
        double e = 0.2 + 0.8 * u(rng);
        double p_det = 0.05 + 0.95 * u(rng);
        Observables r = make_obs(e, p_det, p_det * (0.1 + 0.5 * u(rng)), p_det * 0.15 * u(rng),
                                 p_det * std::pow(10, -7 + 4 * u(rng)), 0.05);
        EXPECT_NEAR(pdet2_upper(r), pdet2_upper_closed_form(r), 1e-9);
    }
}

TEST(pdet2_upper, phase_bias_at_most_one) {
    for (double e : {0.5, 0.8, 1.0}) {
        Observables o = depolarized(e, 0.05, 1e-5);
        double up = pdet2_upper(o);
        DerivedBounds b = derive_bounds(o, up, BoundOptions{.clamp = false});
        EXPECT_LE(b.delta_x_l, 1 + 1e-10);
    }
}

TEST(pdet2_upper, error_free_without_double_clicks) {
    // With no errors and no double clicks a two-photon component would
    // produce errors, so the segment collapses.
    Observables o = make_obs(1.0, 1.0, 0.5, 0.0, 0.0, 0.0);
    EXPECT_EQ(pdet2_upper(o), 0.0);
    EXPECT_EQ(pdet2_upper_closed_form(o), 0.0);
    KeyRateResult r = keyrate_multiphoton(o);
    ASSERT_EQ(r.status, RateStatus::feasible);
    EXPECT_NEAR(r.k_bound, 1.0, 1e-12);
}

TEST(keyrate_multiphoton, reference_point) {
    Observables o = reference_obs();
    KeyRateResult r = keyrate_multiphoton(o);
    ASSERT_EQ(r.status, RateStatus::feasible);
    EXPECT_NEAR(r.k_bound, 1 - 2 * ref_h(0.05), 2e-3);
    EXPECT_NEAR(r.k_bound, 0.427008, 1e-6);
    EXPECT_GE(r.argmin_pdet2, 0.0);
    EXPECT_LE(r.argmin_pdet2, r.pdet2_upper);
}

TEST(keyrate_multiphoton, matches_grid_minimum) {
    for (double e : {0.5, 0.75, 1.0}) {
        for (double qber : {0.02, 0.06}) {
            Observables o = depolarized(e, qber, 1e-4);
            KeyRateResult r = keyrate_multiphoton(o, 0.0);
            ASSERT_EQ(r.status, RateStatus::feasible);
            double up = ref_upper(o, 200000);
            double grid = ref_min_objective(o, up, 20000);
            EXPECT_LE(r.k_bound, grid + 1e-12);
            EXPECT_GE(r.k_bound, grid - 1e-6);
        }
    }
}

TEST(keyrate_multiphoton, aborts) {
    Observables o = reference_obs();
    o.q = 0.5;
    EXPECT_EQ(keyrate_multiphoton(o).status, RateStatus::abort_error_rate);
    Observables dc = reference_obs();
    dc.p_01 = 0.1;
    EXPECT_EQ(keyrate_multiphoton(dc).status, RateStatus::abort_no_single_photon);
    Observables empty = make_obs(0.7, 0.0, 0.0, 0.0, 0.0, 0.0);
    EXPECT_EQ(keyrate_multiphoton(empty).status, RateStatus::abort_no_single_photon);
}

TEST(keyrate_multiphoton, clamps_negative) {
    Observables o = depolarized(0.6, 0.13, 1e-5);
    KeyRateResult r = keyrate_multiphoton(o);
    ASSERT_EQ(r.status, RateStatus::feasible);
    EXPECT_EQ(r.k_bound, 0.0);
    EXPECT_TRUE(r.clamped);
    EXPECT_GT(keyrate_multiphoton(o, 0.0).k_bound, 0.0);
}

TEST(keyrate_multiphoton, objective_midpoint_convex) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0, 1);
    for (double e : {0.4, 0.7, 1.0}) {
        Observables o = depolarized(e, 0.04, 1e-4);
        double up = pdet2_upper(o);
        for (int k = 0; k < 50; ++k) {
            double a = up * u(rng), b = up * u(rng);
            EXPECT_LE(phase_objective(o, 0.5 * (a + b)),
                      0.5 * (phase_objective(o, a) + phase_objective(o, b)) + 1e-10);
        }
    }
}

TEST(keyrate_multiphoton, below_single_photon_tight_rate) {
    for (int i = 0; i <= 50; ++i) {
        double e = 0.5 + 0.5 * i / 50.0;
        Observables o = depolarized(e, 0.05, 1e-5);
        KeyRateResult r = keyrate_multiphoton(o);
        ASSERT_EQ(r.status, RateStatus::feasible);
        double t1 = o.p_det + (1 / e - 1) * o.p_1;
        DeltaPair d = deltas_from_single_obs(o.p_det, o.p_1, t1, o.q, o.eta);
        double tight = keyrate_single_tight(o.p_det, d) - o.p_det * ref_h(o.q_z);
        EXPECT_LE(r.k_bound, tight + 1e-9);
    }
}

TEST(keyrate_multiphoton, vanishing_double_clicks) {
    auto gap = [](double p01) {
        Observables o = make_obs(1.0, 1.0, 0.5, 0.05, p01, 0.05);
        double delta = (o.p_det - 2 * o.q) / o.p_det;
        double limit = o.p_det * (1 - ref_h((1 - delta) / 2)) - o.p_det * ref_h(o.q_z);
        return std::abs(keyrate_multiphoton(o).k_bound - limit);
    };
    EXPECT_LT(gap(1e-9), gap(1e-7));
    EXPECT_LT(gap(1e-9), 1e-4);
}

TEST(keyrate_multiphoton, nonincreasing_in_double_clicks) {
    double last = 1.0;
    for (double p01 : {0.0, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3}) {
        double k = keyrate_multiphoton(depolarized(0.8, 0.03, p01)).k_bound;
        EXPECT_LE(k, last + 1e-12);
        last = k;
    }
}

TEST(keyrate_single_tight, examples) {
    EXPECT_DOUBLE_EQ(keyrate_single_tight(0.7, {0.0, 1.0}), 0.7);
    EXPECT_DOUBLE_EQ(keyrate_single_tight(0.7, {0.0, 0.0}), 0.0);
    EXPECT_NEAR(keyrate_single_tight(0.7, {0.6, 0.8}), 0.7 * ref_h(0.2), 1e-12);
    EXPECT_THROW(keyrate_single_tight(0.7, {0.8, 0.8}), std::domain_error);
}

TEST(keyrate_single_simple, examples) {
    EXPECT_DOUBLE_EQ(keyrate_single_simple(0.6, 1.0), 0.6);
    EXPECT_DOUBLE_EQ(keyrate_single_simple(0.6, 0.0), 0.0);
    EXPECT_THROW(keyrate_single_simple(0.6, 1.2), std::domain_error);
    for (double dx : {-0.5, 0.1, 0.5, 0.93}) {
        EXPECT_NEAR(keyrate_single_simple(0.6, dx), keyrate_single_tight(0.6, {0.0, dx}), 1e-15);
    }
}

TEST(keyrate_no_mismatch, examples) {
    EXPECT_DOUBLE_EQ(keyrate_no_mismatch(0.9, 0.0), 0.9);
    EXPECT_NEAR(keyrate_no_mismatch(1.0, 0.11), 1.68084e-4, 1e-8);
    EXPECT_EQ(keyrate_no_mismatch(1.0, 0.5), 0.0);
}

TEST(deltas_from_single_obs, examples) {
    MismatchEta one(1.0);
    EXPECT_DOUBLE_EQ(deltas_from_single_obs(0.8, 0.4, 0.8, 0.1, one).delta_z, 0.0);
    EXPECT_DOUBLE_EQ(deltas_from_single_obs(0.8, 0.3, 0.8, 0.4, one).delta_x, 0.0);
    EXPECT_NEAR(deltas_from_single_obs(0.8, 0.4, 0.8, 0.05 * 0.8, one).delta_x, 0.9, 1e-15);
    EXPECT_THROW(deltas_from_single_obs(0.0, 0.0, 0.0, 0.0, one), std::invalid_argument);
    EXPECT_THROW(deltas_from_single_obs(0.5, 0.6, 0.5, 0.0, one), std::invalid_argument);
}

TEST(rate_status, names) {
    EXPECT_EQ(to_string(RateStatus::feasible), "feasible");
    EXPECT_EQ(to_string(RateStatus::abort_error_rate), "abort_error_rate");
    EXPECT_EQ(to_string(RateStatus::abort_no_single_photon), "abort_no_single_photon");
}
