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

#include "qkdmm/simulate.h"

#include <cmath>
#include <locale>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qkdmm {

namespace {

double real_trace(const Matrix& a, const Matrix& b) { return (a * b).trace().real(); }

}  // namespace

void DepolarizingModel::validate() const {
    if (!(qber >= 0.0 && qber <= 0.5)) throw std::invalid_argument("depolarizing weight must lie in [0, 1/2]");
    if (!(p01_override >= 0.0 && p01_override <= 1.0)) throw std::invalid_argument("p01 must lie in [0,1]");
    if (!(transmittance >= 0.0 && transmittance <= 1.0)) throw std::invalid_argument("transmittance must lie in [0,1]");
}

Observables depolarized_observables(const DepolarizingModel& m) {
    m.validate();
    const double eta = m.eta.value();
    Observables obs;
    obs.eta = m.eta;
    obs.p_det = m.transmittance * (1.0 + eta) / 2.0;
    obs.p_1 = m.transmittance * eta / 2.0;
    obs.q = m.transmittance * m.qber;
    obs.p_01 = m.p01_override;
    obs.q_z = m.qber;
    return obs;
}

JointState depolarized_state(double qber) {
    if (!(qber >= 0.0 && qber <= 0.5)) throw std::invalid_argument("depolarizing weight must lie in [0, 1/2]");
    Eigen::Vector4cd bell = Eigen::Vector4cd::Zero();
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    Matrix block = (1.0 - 2.0 * qber) * Matrix(bell * bell.adjoint()) + (qber / 2.0) * Matrix::Identity(4, 4);
    JointState state;
    state.blocks = {Matrix::Zero(2, 2), block};
    return state;
}

StateObservables observables_from_state(const JointState& state, MismatchEta eta) {
    state.validate();
    const double inv_eta = 1.0 / eta.value();

    StateObservables out;
    double errors_z = 0.0;
    for (int n = 0; n <= state.max_photons(); ++n) {
        const Matrix& block = state.blocks[n];
        SectorStat s;
        s.n = n;
        if (block.size() == 0) {
            out.sectors.push_back(s);
            continue;
        }
        Matrix bob = trace_out_first(block, 2);
        s.t = bob.trace().real();
        if (n == 0) {
            // Vacuum never clicks.
            s.p_none = s.t;
            out.sectors.push_back(s);
            continue;
        }
        PovmSet z = build_povm(n, eta, Basis::z);
        PovmSet x = build_povm(n, eta, Basis::x);
        s.p_none = real_trace(bob, z.none);
        s.p_0 = real_trace(bob, z.click0);
        s.p_1 = real_trace(bob, z.click1);
        s.p_01_z = real_trace(bob, z.double_click);
        s.p_det = s.t - s.p_none;
        s.p_01 = 0.5 * (s.p_01_z + real_trace(bob, x.double_click));

        Matrix half_double = 0.5 * x.double_click;
        Matrix weighted = inv_eta * kron_alice(alice_x_projector(true), x.click1 + half_double) +
                          kron_alice(alice_x_projector(false), x.click0 + half_double);
        s.q = real_trace(block, weighted);

        // z-basis errors: Alice 0 with a 1 click, Alice 1 with a 0 click,
        // and half of every double click.
        const Eigen::Index d = n + 1;
        Matrix bob_given0 = block.block(0, 0, d, d);
        Matrix bob_given1 = block.block(d, d, d, d);
        errors_z += real_trace(bob_given0, z.click1) + real_trace(bob_given1, z.click0) + 0.5 * s.p_01_z;

        out.obs.p_det += s.p_det;
        out.obs.p_1 += s.p_1;
        out.obs.q += s.q;
        out.obs.p_01 += s.p_01;
        out.sectors.push_back(s);
    }
    out.obs.eta = eta;
    out.obs.q_z = out.obs.p_det > 0.0 ? errors_z / out.obs.p_det : 0.0;
    return out;
}

std::vector<double> eta_grid(double eta_min, double eta_max, int steps) {
    if (!(eta_min > 0.0 && eta_min <= eta_max && eta_max <= 1.0)) {
        throw std::invalid_argument("eta range must satisfy 0 < eta-min <= eta-max <= 1");
    }
    if (steps < 1) throw std::invalid_argument("steps must be at least 1");
    std::vector<double> grid;
    if (steps == 1) {
        grid.push_back(eta_min);
        return grid;
    }
    for (int i = 0; i < steps; ++i) {
        grid.push_back(eta_min + (eta_max - eta_min) * i / (steps - 1));
    }
    grid.back() = eta_max;
    return grid;
}

std::vector<SweepRow> sweep_figure(double qber, double p01, const std::vector<double>& etas) {
    std::vector<SweepRow> rows;
    for (double e : etas) {
        DepolarizingModel model{qber, MismatchEta(e), p01};
        Observables obs = depolarized_observables(model);
        const double correction = obs.p_det * binary_entropy(obs.q_z);

        SweepRow row;
        row.eta = e;
        KeyRateResult main = keyrate_multiphoton(obs);
        row.status = main.status;
        if (main.status == RateStatus::feasible) row.k_main = main.k_bound;

        // Single-photon closed forms: every detection is a one-photon event.
        const double t1 = obs.p_det + (1.0 / e - 1.0) * obs.p_1;
        DeltaPair deltas = deltas_from_single_obs(obs.p_det, obs.p_1, t1, obs.q, obs.eta);
        row.k_tight = keyrate_single_tight(obs.p_det, deltas) - correction;
        row.k_simple = keyrate_single_simple(obs.p_det, deltas.delta_x) - correction;
        row.k_nomismatch = keyrate_no_mismatch(obs.p_det, qber);
        row.ratio = (row.k_main && row.k_nomismatch > 0.0) ? *row.k_main / row.k_nomismatch : 0.0;
        rows.push_back(row);
    }
    return rows;
}

std::string format_number(double value, int digits) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(digits);
    os << value;
    return os.str();
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "eta,k_main,k_tight,k_simple,k_nomismatch,ratio,status\n";
    for (const SweepRow& r : rows) {
        out << format_number(r.eta) << ',' << (r.k_main ? format_number(*r.k_main) : std::string()) << ','
            << format_number(r.k_tight) << ',' << format_number(r.k_simple) << ',' << format_number(r.k_nomismatch)
            << ',' << format_number(r.ratio) << ',' << to_string(r.status) << '\n';
    }
}

}  // namespace qkdmm
