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

// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "forward_model.h"
#include "qkdmm/cli.h"
#include "qkdmm/decoy.h"
#include "qkdmm/keyrate.h"
#include "qkdmm/oracles.h"
#include "qkdmm/scalarmath.h"
#include "qkdmm/simulate.h"

using namespace qkdmm;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

double ref_h(double x) {
    if (x <= 0 || x >= 1) return 0;
    return -x * std::log2(x) - (1 - x) * std::log2(1 - x);
}

std::string num(double v) { return format_number(v, 8); }

Verdict ac1() {
    std::vector<const char*> argv = {"qkdmm", "keyrate", "--eta", "1",     "--p-det", "1",    "--p1",   "0.5",
                                     "--q",   "0.05",    "--p01", "1e-5",  "--qz",    "0.05", "--mode", "multiphoton"};
    std::ostringstream out, err;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    std::istringstream is(out.str());
    std::string line;
    double k = std::nan("");
    while (std::getline(is, line)) {
        if (line.rfind("k: ", 0) == 0) k = std::stod(line.substr(3));
    }
    const double target = 1 - 2 * ref_h(0.05);
    bool ok = code == 0 && std::abs(k - target) <= 2e-3;
    return {ok, "k=" + num(k) + " target=" + num(target) + " tol=2e-3 exit=" + std::to_string(code)};
}

Verdict ac2() {
    std::vector<SweepRow> rows = sweep_figure(0.05, 1e-5, eta_grid(0.5, 1.0, 51));
    bool ok = rows.size() == 51;
    int monotone_breaks = 0, above_tight = 0;
    double worst_gap = -1e300;
    for (size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].k_main) {
            ok = false;
            continue;
        }
        worst_gap = std::max(worst_gap, *rows[i].k_main - rows[i].k_tight);
        if (*rows[i].k_main > rows[i].k_tight + 1e-9) ++above_tight;
        if (i > 0 && rows[i - 1].k_main && *rows[i - 1].k_main > *rows[i].k_main) ++monotone_breaks;
    }
    ok = ok && monotone_breaks == 0 && above_tight == 0;
    return {ok, "rows=" + std::to_string(rows.size()) + " monotone_breaks=" + std::to_string(monotone_breaks) +
                    " max(k_main-k_tight)=" + num(worst_gap)};
}

Verdict ac3() {
    SweepRow r = sweep_figure(0.09, 1e-5, {0.8})[0];
    return {r.ratio > 0.90, "ratio=" + num(r.ratio) + " threshold=0.9"};
}

Verdict ac4() {
    auto f = [](double y) { return 2 * y * std::log2(3.0) + 2 * ref_h(y) - 1; };
    double prev = f(1e-9), scan = -1;
    for (int k = 1; k <= 500000; ++k) {
        double y = k * 1e-6, cur = f(y);
        if (prev < 0 && cur >= 0) {
            scan = y - 1e-6 * cur / (cur - prev);
            break;
        }
        prev = cur;
    }
    double root = p01_min(3);
    bool monotone = true;
    for (int n = 3; n < 10; ++n) monotone = monotone && p01_min(n + 1) >= p01_min(n);
    bool ok = std::abs(root - scan) <= 2e-6 && monotone;
    return {ok, "bisection=" + format_number(root, 10) + " scan=" + format_number(scan, 10) +
                    " nondecreasing_3_10=" + (monotone ? "yes" : "no")};
}

Verdict report_verdict(const std::vector<TrialReport>& reports, double tol) {
    bool ok = true;
    std::string detail;
    for (const TrialReport& r : reports) {
        ok = ok && r.violations == 0 && r.worst_slack >= -tol;
        detail += r.suite + "[violations=" + std::to_string(r.violations) + " worst=" + format_number(r.worst_slack, 4) +
                  "] ";
    }
    return {ok, detail};
}

Verdict ac5() {
    std::vector<TrialReport> reports;
    for (int n = 3; n <= 5; ++n) reports.push_back(check_lemma4(n, 1000, 2026));
    return report_verdict(reports, 1e-9);
}

Verdict ac6() { return report_verdict({check_prop3(1000, 2026)}, 1e-8); }

Verdict ac7() {
    Verdict v = report_verdict({check_prop4(1000, 2026, MismatchEta(0.5)), check_prop4(1000, 2026, MismatchEta(0.9))},
                               1e-9);
    // Identity for (1/2) I (x) |Phi+><Phi+| at each tested efficiency.
    for (double e : {0.5, 0.9, 1.0}) {
        MismatchEta eta(e);
        double ratio = bell_error_ratio(eta);
        double expect = (1 + theta(eta, 2)) / 4;
        bool exact = std::abs(ratio - expect) <= 1e-10;
        v.pass = v.pass && exact;
        v.detail += "bell(eta=" + num(e) + ")=" + num(ratio) + (exact ? "==" : "!=") + num(expect) + " ";
    }
    return v;
}

Verdict ac8() { return report_verdict({check_objective_convexity(200, 2026)}, 1e-10); }

Verdict ac9() {
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> u(0, 1);
    int violations = 0;
    for (int t = 0; t < 100; ++t) {
        const double eta = 0.3 + 0.7 * u(rng);
        forward::ForwardChannel ch = forward::random_channel(rng, eta);
        DecoyInputs d = forward::random_inputs(rng, ch, eta, t);
        forward::ForwardTruth tr = forward::truth(ch, d.signal.mu, eta);
        if (single_gain_lower(d, DecoyChannel::detect) > tr.single_detect) ++violations;
        if (single_gain_lower(d, DecoyChannel::click1) > tr.single_click1) ++violations;
        if (single_q_upper(d) < tr.single_q) ++violations;
    }
    return {violations == 0, "channels=100 violations=" + std::to_string(violations)};
}

Verdict ac10() { return report_verdict({check_fock(200, 2026)}, 1e-12); }

}  // namespace

int main() {
    struct Criterion {
        const char* id;
        double budget_s;  // 0 when the criterion sets no runtime limit
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> criteria = {
        {"AC1", 1.0, ac1}, {"AC2", 5.0, ac2}, {"AC3", 0, ac3},  {"AC4", 0, ac4},   {"AC5", 30.0, ac5},
        {"AC6", 0, ac6},   {"AC7", 0, ac7},   {"AC8", 0, ac8},  {"AC9", 0, ac9},   {"AC10", 0, ac10},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool in_time = c.budget_s == 0 || seconds < c.budget_s;
        bool pass = v.pass && in_time;
        failures += !pass;
        std::cout << c.id << ' ' << (pass ? "PASS" : "FAIL") << ' ' << v.detail << " time=" << format_number(seconds, 3)
                  << "s" << (c.budget_s > 0 ? " budget=" + format_number(c.budget_s, 3) + "s" : std::string()) << '\n';
    }
    return failures == 0 ? 0 : 1;
}
