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

#ifndef QKDMM_SIMULATE_H
#define QKDMM_SIMULATE_H

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qkdmm/fock.h"
#include "qkdmm/keyrate.h"

namespace qkdmm {

/// Lossless single-photon channel that depolarizes with weight 2Q. Double
/// clicks do not occur in this model and are injected via p01_override.
struct DepolarizingModel {
    double qber = 0.0;
    MismatchEta eta{1.0};
    double p01_override = 0.0;
    double transmittance = 1.0;  ///< Scales all rates linearly.

    void validate() const;
};

Observables depolarized_observables(const DepolarizingModel& m);

/// The model's Alice-Bob state as a one-photon joint block.
JointState depolarized_state(double qber);

/// Per photon number contributions to the observables.
struct SectorStat {
    int n = 0;
    double t = 0.0;  ///< Sector weight.
    double p_none = 0.0;
    double p_0 = 0.0;
    double p_1 = 0.0;
    double p_01_z = 0.0;
    double p_det = 0.0;
    double q = 0.0;
    double p_01 = 0.0;  ///< Mean of z- and x-basis double clicks.
};

struct StateObservables {
    Observables obs;
    std::vector<SectorStat> sectors;
};

/// Exact expected observables of a block-diagonal state under the imperfect
/// detectors. Throws std::invalid_argument on a non-PSD block.
StateObservables observables_from_state(const JointState& state, MismatchEta eta);

struct SweepRow {
    double eta = 0.0;
    std::optional<double> k_main;
    double k_tight = 0.0;
    double k_simple = 0.0;
    double k_nomismatch = 0.0;
    double ratio = 0.0;
    RateStatus status = RateStatus::feasible;
};

/// steps evenly spaced points on [eta_min, eta_max], ascending.
std::vector<double> eta_grid(double eta_min, double eta_max, int steps);

/// One row per grid point of the depolarizing model. The single-photon
/// reference columns include the same error-correction charge as k_main.
std::vector<SweepRow> sweep_figure(double qber, double p01, const std::vector<double>& etas);

/// Header `eta,k_main,k_tight,k_simple,k_nomismatch,ratio,status`, values
/// with 10 significant digits independent of the global locale.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Locale-independent number formatting with the given significant digits.
std::string format_number(double value, int digits = 10);

}  // namespace qkdmm

#endif
