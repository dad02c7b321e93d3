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

#include "qkdmm/decoy.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qkdmm {

namespace {

double rate(const IntensityRecord& r, DecoyChannel channel) {
    return channel == DecoyChannel::detect ? r.p_det : r.p_1;
}

// Error rate with the weaker detector's errors rescaled by 1/eta.
double weighted_error(const IntensityRecord& r, double eta) { return r.q0 + r.q1 / eta; }

}  // namespace

void IntensityRecord::validate(const char* label) const {
    auto fail = [&](const std::string& what) {
        throw std::invalid_argument(std::string("invalid ") + label + " record: " + what);
    };
    if (!(mu >= 0.0)) fail("mean photon number must be nonnegative");
    for (double v : {p_det, p_1, p_01, q0, q1}) {
        if (!(v >= 0.0 && v <= 1.0)) fail("rates must lie in [0,1]");
    }
    if (p_1 > p_det) fail("p_1 must not exceed p_det");
}

void DecoyInputs::validate() const {
    signal.validate("signal");
    decoy1.validate("decoy1");
    decoy2.validate("decoy2");
    const double mu = signal.mu;
    const double nu1 = decoy1.mu;
    const double nu2 = decoy2.mu;
    if (!(mu > 0.0)) throw std::invalid_argument("signal intensity must be positive");
    if (!(nu2 >= 0.0 && nu2 < nu1)) throw std::invalid_argument("decoy intensities must satisfy 0 <= nu2 < nu1");
    if (!(nu1 + nu2 < mu)) throw std::invalid_argument("decoy intensities must satisfy nu1 + nu2 < mu");
}

double y0_lower(const DecoyInputs& d, DecoyChannel channel) {
    const double nu1 = d.decoy1.mu;
    const double nu2 = d.decoy2.mu;
    if (nu1 == nu2) throw std::invalid_argument("y0_lower: decoy intensities must differ");
    const double g1 = rate(d.decoy1, channel);
    const double g2 = rate(d.decoy2, channel);
    return std::max((nu1 * g2 * std::exp(nu2) - nu2 * g1 * std::exp(nu1)) / (nu1 - nu2), 0.0);
}

double single_gain_lower(const DecoyInputs& d, DecoyChannel channel) {
    const double mu = d.signal.mu;
    const double nu1 = d.decoy1.mu;
    const double nu2 = d.decoy2.mu;
    const double denom = mu * nu1 - mu * nu2 - nu1 * nu1 + nu2 * nu2;
    if (!(denom > 0.0)) throw std::invalid_argument("single_gain_lower: nonpositive intensity denominator");
    const double bracket = rate(d.decoy1, channel) * std::exp(nu1) - rate(d.decoy2, channel) * std::exp(nu2) -
                           (nu1 * nu1 - nu2 * nu2) / (mu * mu) *
                               (rate(d.signal, channel) * std::exp(mu) - y0_lower(d, channel));
    return std::max(mu * mu * std::exp(-mu) / denom * bracket, 0.0);
}

double single_q_upper(const DecoyInputs& d) {
    const double nu1 = d.decoy1.mu;
    const double nu2 = d.decoy2.mu;
    if (nu1 == nu2) throw std::invalid_argument("single_q_upper: decoy intensities must differ");
    const double mu = d.signal.mu;
    const double eta = d.eta.value();
    const double spread = weighted_error(d.decoy1, eta) * std::exp(nu1) - weighted_error(d.decoy2, eta) * std::exp(nu2);
    return std::max(spread * mu * std::exp(-mu) / (nu1 - nu2), 0.0);
}

Observables decoy_observables(const DecoyInputs& d, double q_z) {
    d.validate();
    Observables obs;
    obs.eta = d.eta;
    obs.p_det = std::min(single_gain_lower(d, DecoyChannel::detect), 1.0);
    obs.p_1 = std::min(single_gain_lower(d, DecoyChannel::click1), obs.p_det);
    obs.q = single_q_upper(d);
    // Multiphoton double clicks are bounded by the signal's; a value above
    // the single-photon estimate already forces an abort downstream.
    obs.p_01 = std::min(d.signal.p_01, obs.p_det);
    obs.q_z = q_z;
    obs.validate();
    return obs;
}

KeyRateResult decoy_keyrate(const DecoyInputs& d, double q_z) {
    Observables obs = decoy_observables(d, q_z);
    if (d.signal.p_01 > obs.p_det) {
        KeyRateResult out;
        out.status = RateStatus::abort_no_single_photon;
        return out;
    }
    return keyrate_multiphoton(obs, d.signal.p_det * binary_entropy(q_z));
}

}  // namespace qkdmm
