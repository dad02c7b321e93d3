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

#ifndef QKDMM_KEYRATE_H
#define QKDMM_KEYRATE_H

#include <string>

#include "qkdmm/scalarmath.h"

namespace qkdmm {

/// Rates observed by Alice and Bob, all per sent pulse.
struct Observables {
    MismatchEta eta{1.0};
    double p_det = 0.0;  ///< z-basis detection probability.
    double p_1 = 0.0;    ///< z-basis single click of the weaker detector.
    double q = 0.0;      ///< x-basis error rate, erroneous ones weighted by 1/eta.
    double p_01 = 0.0;   ///< Double-click probability averaged over both bases.
    double q_z = 0.0;    ///< z-basis QBER (error ratio among detections).

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
};

/// Intermediate bounds at a fixed two-photon detection contribution pdet2.
struct DerivedBounds {
    double pdet2 = 0.0;
    double pdet3plus_u = 0.0;
    double pdet1_l = 0.0;
    double p1_2_u = 0.0;
    double p1_1_l = 0.0;
    double t1_l = 0.0;
    double q2_l = 0.0;
    double q1_u = 0.0;
    double delta_x_l = 0.0;

    /// False when pdet1_l <= 0; delta_x_l is then meaningless and set to 0.
    bool has_single_photons() const { return pdet1_l > 0.0; }
};

struct BoundOptions {
    /// Apply p1_2_u <= pdet2 and 0 <= q2_l <= q.
    bool clamp = true;
    /// Use t1_l = pdet1_l - (1/eta - 1) p1_1_l instead of the plus sign.
    /// Only for comparison; the minus sign does not give a lower bound.
    bool literal_t1_sign = false;
};

DerivedBounds derive_bounds(const Observables& obs, double pdet2, const BoundOptions& opts = {});

/// Largest pdet2 in [0, p_det - pdet3plus_u] for which the unclamped bounds
/// stay consistent: delta_x_l <= 1 and q2_l <= q. Found by bisection in
/// u = sqrt(pdet2).
double pdet2_upper(const Observables& obs);

/// Same endpoint from the closed-form roots of the two quadratics in
/// sqrt(pdet2).
double pdet2_upper_closed_form(const Observables& obs);

/// pdet1_l [1 - h((1 - delta_x_l) / 2)], with delta_x_l capped at 1.
double phase_objective(const Observables& obs, double pdet2);

enum class RateStatus { feasible, abort_error_rate, abort_no_single_photon };

std::string to_string(RateStatus status);

/// Minimum of phase_objective over the feasible pdet2 segment.
struct PhaseTermResult {
    double min_value = 0.0;
    double argmin_pdet2 = 0.0;
    double pdet2_upper = 0.0;
    RateStatus status = RateStatus::feasible;
};

PhaseTermResult minimize_phase_term(const Observables& obs);

struct KeyRateResult {
    double k_bound = 0.0;  ///< Valid only when status is feasible.
    double argmin_pdet2 = 0.0;
    double pdet2_upper = 0.0;
    RateStatus status = RateStatus::feasible;
    bool clamped = false;  ///< The raw bound was negative and reported as 0.
};

/// Lower bound on the key rate for multiphoton Bob inputs, with error
/// correction cost p_det h(Q_z).
KeyRateResult keyrate_multiphoton(const Observables& obs);

/// Same, but with an explicit error-correction term in place of
/// obs.p_det * h(obs.q_z).
KeyRateResult keyrate_multiphoton(const Observables& obs, double error_correction);

struct DeltaPair {
    double delta_z = 0.0;
    double delta_x = 0.0;
};

/// Biases of the attenuated single-photon state in the z and x bases.
DeltaPair deltas_from_single_obs(double pdet1, double p1_1, double t1, double q1, MismatchEta eta);

/// p_det [h((1 - delta_z)/2) - h((1 - sqrt(delta_x^2 + delta_z^2))/2)].
double keyrate_single_tight(double p_det, const DeltaPair& deltas);

/// p_det [1 - h((1 - delta_x)/2)].
double keyrate_single_simple(double p_det, double delta_x);

/// p_det [1 - 2h(Q)], clamped at 0.
double keyrate_no_mismatch(double p_det, double qber);

}  // namespace qkdmm

#endif
