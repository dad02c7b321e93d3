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

#include "qkdmm/scalarmath.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace qkdmm {

namespace {

double snap_probability(double x) {
    if (!(x >= -kProbabilitySlack && x <= 1.0 + kProbabilitySlack)) {
        throw std::domain_error("probability out of [0,1]: " + std::to_string(x));
    }
    return std::clamp(x, 0.0, 1.0);
}

}  // namespace

Probability::Probability(double value) : value_(snap_probability(value)) {}

MismatchEta::MismatchEta(double value) : value_(value) {
    if (!(value > 0.0 && value <= 1.0)) {
        throw std::domain_error("mismatch eta must lie in (0,1]: " + std::to_string(value));
    }
}

double binary_entropy(double x) {
    x = snap_probability(x);
    if (x == 0.0 || x == 1.0) {
        return 0.0;
    }
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double theta(MismatchEta eta, int n) {
    if (n < 0) {
        throw std::invalid_argument("theta: photon number must be nonnegative");
    }
    return 1.0 - std::pow(1.0 - eta.value(), n);
}

double double_click_residual(int n, double y) {
    // log2(2^(n-1) - 1) computed without overflow for moderately large n.
    double log_term = (n - 1) + std::log2(1.0 - std::ldexp(1.0, 1 - n));
    return 2.0 * y * log_term + 2.0 * binary_entropy(y) - n + 2.0;
}

double p01_min(int n) {
    if (n < 3) {
        throw std::invalid_argument("p01_min requires n >= 3, got " + std::to_string(n));
    }
    // F(n, 0) = 2 - n < 0 and F(n, 1/2) > 0; F is increasing in between.
    double lo = 0.0;
    double hi = 0.5;
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        if (double_click_residual(n, mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace qkdmm
