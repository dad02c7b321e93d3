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

#ifndef QKDMM_DECOY_H
#define QKDMM_DECOY_H

#include "qkdmm/keyrate.h"
#include "qkdmm/scalarmath.h"

namespace qkdmm {

/// Observed per-pulse rates at one source intensity. q0 and q1 are the
/// probabilities of an erroneous x-basis outcome at detector 0 and detector 1.
struct IntensityRecord {
    double mu = 0.0;
    double p_det = 0.0;
    double p_1 = 0.0;
    double p_01 = 0.0;
    double q0 = 0.0;
    double q1 = 0.0;

    void validate(const char* label) const;
};

/// Signal plus two weaker decoys. decoy2 may be the vacuum (mu = 0).
struct DecoyInputs {
    IntensityRecord signal;
    IntensityRecord decoy1;
    IntensityRecord decoy2;
    MismatchEta eta{1.0};

    /// Requires 0 <= nu2 < nu1 and nu1 + nu2 < mu.
    void validate() const;
};

/// Which observed family the gain estimator is applied to.
enum class DecoyChannel { detect, click1 };

/// Lower bound on the vacuum yield from the two decoys.
double y0_lower(const DecoyInputs& d, DecoyChannel channel = DecoyChannel::detect);

/// Lower bound on the single-photon contribution to the signal rate.
double single_gain_lower(const DecoyInputs& d, DecoyChannel channel);

/// Upper bound on the single-photon contribution to the signal's weighted
/// x-basis error rate q.
double single_q_upper(const DecoyInputs& d);

/// Single-photon observables substituted into the multiphoton engine.
Observables decoy_observables(const DecoyInputs& d, double q_z);

/// Key rate per signal pulse; error correction is charged on the full
/// signal detection rate.
KeyRateResult decoy_keyrate(const DecoyInputs& d, double q_z);

}  // namespace qkdmm

#endif
