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

#ifndef QKDMM_SCALARMATH_H
#define QKDMM_SCALARMATH_H

#include <stdexcept>

namespace qkdmm {

/// Tolerance for accepting probabilities that drift slightly outside [0, 1].
inline constexpr double kProbabilitySlack = 1e-12;

/// A probability in [0, 1]. Values within kProbabilitySlack of the interval
/// are snapped onto it; anything further out throws std::domain_error.
class Probability {
   public:
    Probability() = default;
    explicit Probability(double value);
    double value() const { return value_; }
    operator double() const { return value_; }

   private:
    double value_ = 0.0;
};

/// Ratio of the weaker detector efficiency to the stronger one, in (0, 1].
class MismatchEta {
   public:
    explicit MismatchEta(double value);
    double value() const { return value_; }
    operator double() const { return value_; }

   private:
    double value_;
};

/// Base-2 binary entropy with 0 log 0 = 0.
double binary_entropy(double x);

/// Probability that at least one of n photons fires the detector of
/// efficiency eta: 1 - (1 - eta)^n.
double theta(MismatchEta eta, int n);

/// F(n, y) = 2y log2(2^(n-1) - 1) + 2h(y) - n + 2. Its zero in y is the
/// smallest mean double-click probability compatible with the n-photon
/// uncertainty bound.
double double_click_residual(int n, double y);

/// Root of double_click_residual(n, .) on (0, 1/2) by bisection to 1e-12.
/// Requires n >= 3.
double p01_min(int n);

}  // namespace qkdmm

#endif
