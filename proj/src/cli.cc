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

#include "qkdmm/cli.h"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <locale>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qkdmm/keyrate.h"
#include "qkdmm/oracles.h"
#include "qkdmm/simulate.h"

namespace qkdmm {

namespace {

std::string trim(const std::string& s) {
    const char* ws = " \t\r\n";
    size_t b = s.find_first_not_of(ws);
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    std::istringstream is(text);
    is.imbue(std::locale::classic());
    double v = 0.0;
    is >> v;
    if (is.fail() || !is.eof()) {
        throw std::invalid_argument("config key '" + key + "': not a number: '" + text + "'");
    }
    return v;
}

void print_field(std::ostream& out, const std::string& key, double value) {
    out << key << ": " << format_number(value) << '\n';
}

int status_exit(RateStatus status) { return status == RateStatus::feasible ? kExitOk : kExitAbort; }

struct KeyrateFlags {
    double eta = 1.0;
    double p_det = 0.0;
    double p_1 = 0.0;
    double q = 0.0;
    double p_01 = 0.0;
    double q_z = 0.0;
    std::string mode = "multiphoton";
};

int cmd_keyrate(const KeyrateFlags& f, std::ostream& out) {
    Observables obs;
    obs.eta = MismatchEta(f.eta);
    obs.p_det = f.p_det;
    obs.p_1 = f.p_1;
    obs.q = f.q;
    obs.p_01 = f.p_01;
    obs.q_z = f.q_z;
    obs.validate();
    const double correction = obs.p_det * binary_entropy(obs.q_z);

    if (f.mode == "multiphoton") {
        KeyRateResult r = keyrate_multiphoton(obs);
        out << "mode: multiphoton\nstatus: " << to_string(r.status) << '\n';
        if (r.status == RateStatus::feasible) {
            print_field(out, "k", r.k_bound);
            print_field(out, "argmin_pdet2", r.argmin_pdet2);
            print_field(out, "pdet2_upper", r.pdet2_upper);
            if (r.clamped) out << "note: negative bound reported as 0\n";
        }
        return status_exit(r.status);
    }
    if (f.mode == "nomismatch") {
        out << "mode: nomismatch\nstatus: feasible\n";
        print_field(out, "k", keyrate_no_mismatch(obs.p_det, obs.q_z));
        return kExitOk;
    }
    // Single-photon reference modes read every detection as a one-photon event.
    if (!(obs.p_det > 0.0)) {
        out << "mode: " << f.mode << "\nstatus: " << to_string(RateStatus::abort_no_single_photon) << '\n';
        return kExitAbort;
    }
    const double t1 = obs.p_det + (1.0 / obs.eta.value() - 1.0) * obs.p_1;
    DeltaPair d = deltas_from_single_obs(obs.p_det, obs.p_1, t1, obs.q, obs.eta);
    if (!(d.delta_x > 0.0)) {
        out << "mode: " << f.mode << "\nstatus: " << to_string(RateStatus::abort_error_rate) << '\n';
        return kExitAbort;
    }
    double raw = f.mode == "tight" ? keyrate_single_tight(obs.p_det, d) : keyrate_single_simple(obs.p_det, d.delta_x);
    raw -= correction;
    out << "mode: " << f.mode << "\nstatus: feasible\n";
    print_field(out, "k", std::max(raw, 0.0));
    print_field(out, "delta_z", d.delta_z);
    print_field(out, "delta_x", d.delta_x);
    if (raw < 0.0) out << "note: negative bound reported as 0\n";
    return kExitOk;
}

struct SweepFlags {
    double qber = 0.05;
    double p01 = 1e-5;
    double eta_min = 0.5;
    double eta_max = 1.0;
    int steps = 51;
    std::string out = "-";
};

int cmd_sweep(const SweepFlags& f, std::ostream& out) {
    if (!(f.qber >= 0.0 && f.qber <= 0.5)) throw std::invalid_argument("qber must lie in [0, 1/2]");
    std::vector<SweepRow> rows = sweep_figure(f.qber, f.p01, eta_grid(f.eta_min, f.eta_max, f.steps));
    if (f.out == "-") {
        write_sweep_csv(out, rows);
        return kExitOk;
    }
    std::ofstream file(f.out, std::ios::binary);
    if (!file) throw std::invalid_argument("cannot open output file '" + f.out + "'");
    write_sweep_csv(file, rows);
    file.close();
    if (!file) throw std::invalid_argument("failed writing output file '" + f.out + "'");
    out << "wrote " << rows.size() << " rows to " << f.out << '\n';
    return kExitOk;
}

int cmd_decoy(const std::string& path, std::ostream& out) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config '" + path + "'");
    DecoyConfig cfg = decoy_config_from(parse_config(in));
    cfg.inputs.validate();
    print_field(out, "single_p_det_lower", single_gain_lower(cfg.inputs, DecoyChannel::detect));
    print_field(out, "single_p_1_lower", single_gain_lower(cfg.inputs, DecoyChannel::click1));
    print_field(out, "single_q_upper", single_q_upper(cfg.inputs));
    print_field(out, "y0_lower", y0_lower(cfg.inputs));
    KeyRateResult r = decoy_keyrate(cfg.inputs, cfg.q_z);
    out << "status: " << to_string(r.status) << '\n';
    if (r.status == RateStatus::feasible) {
        print_field(out, "k", r.k_bound);
        print_field(out, "argmin_pdet2", r.argmin_pdet2);
    }
    return status_exit(r.status);
}

int cmd_p01min(int n, std::ostream& out) {
    if (n < 3) throw std::invalid_argument("n must be at least 3");
    out << format_number(p01_min(n), 12) << '\n';
    return kExitOk;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("QKDMM_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
        }
    }
    return 7;
}

struct VerifyFlags {
    std::string suite = "all";
    int trials = 500;
    std::uint64_t seed = 7;
    std::string csv;
};

int cmd_verify(const VerifyFlags& f, std::ostream& out) {
    std::vector<TrialReport> reports = run_suite(f.suite, f.trials, f.seed);
    bool ok = true;
    for (const TrialReport& r : reports) {
        out << format_report(r) << '\n';
        ok = ok && r.passed();
    }
    if (!f.csv.empty()) {
        std::ofstream file(f.csv, std::ios::binary);
        if (!file) throw std::invalid_argument("cannot open csv file '" + f.csv + "'");
        file << format_report_csv(reports);
    }
    out << (ok ? "all checks passed" : "VIOLATIONS FOUND") << '\n';
    return ok ? kExitOk : kExitViolation;
}

}  // namespace

std::map<std::string, std::string> parse_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key or value");
        }
        if (!kv.emplace(key, value).second) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
    }
    return kv;
}

DecoyConfig decoy_config_from(const std::map<std::string, std::string>& kv) {
    static const std::set<std::string> required = {
        "mu",           "nu1",          "nu2",        "eta",        "q_z",          "signal.p_det",
        "signal.p_1",   "signal.p_01",  "decoy1.p_det", "decoy1.p_1", "decoy1.q0",  "decoy1.q1",
        "decoy2.p_det", "decoy2.p_1",   "decoy2.q0",  "decoy2.q1",
    };
    static const std::set<std::string> optional = {"signal.q0", "signal.q1", "decoy1.p_01", "decoy2.p_01"};
    for (const auto& [key, value] : kv) {
        if (!required.count(key) && !optional.count(key)) {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
    for (const std::string& key : required) {
        if (!kv.count(key)) throw std::invalid_argument("missing config key '" + key + "'");
    }
    auto get = [&](const std::string& key) {
        auto it = kv.find(key);
        return it == kv.end() ? 0.0 : parse_double(key, it->second);
    };
    DecoyConfig cfg;
    cfg.inputs.eta = MismatchEta(get("eta"));
    cfg.q_z = get("q_z");
    if (!(cfg.q_z >= 0.0 && cfg.q_z <= 1.0)) throw std::invalid_argument("q_z must lie in [0,1]");
    auto fill = [&](IntensityRecord& r, const std::string& prefix, const std::string& intensity) {
        r.mu = get(intensity);
        r.p_det = get(prefix + ".p_det");
        r.p_1 = get(prefix + ".p_1");
        r.p_01 = get(prefix + ".p_01");
        r.q0 = get(prefix + ".q0");
        r.q1 = get(prefix + ".q1");
    };
    fill(cfg.inputs.signal, "signal", "mu");
    fill(cfg.inputs.decoy1, "decoy1", "nu1");
    fill(cfg.inputs.decoy2, "decoy2", "nu2");
    return cfg;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Key-rate bounds for BB84 with mismatched detector efficiencies"};
    app.require_subcommand(1);

    KeyrateFlags kf;
    CLI::App* keyrate = app.add_subcommand("keyrate", "Evaluate a key-rate bound from observed rates");
    keyrate->add_option("--eta", kf.eta, "Efficiency of the weaker detector, in (0,1]")->required();
    keyrate->add_option("--p-det", kf.p_det, "z-basis detection probability")->required();
    keyrate->add_option("--p1", kf.p_1, "z-basis single-click probability of the weaker detector")->required();
    keyrate->add_option("--q", kf.q, "Weighted x-basis error rate")->required();
    keyrate->add_option("--p01", kf.p_01, "Mean double-click probability")->required();
    keyrate->add_option("--qz", kf.q_z, "z-basis QBER")->required();
    keyrate->add_option("--mode", kf.mode, "multiphoton | tight | simple | nomismatch")
        ->check(CLI::IsMember({"multiphoton", "tight", "simple", "nomismatch"}));

    SweepFlags sf;
    CLI::App* sweep = app.add_subcommand("sweep", "Tabulate rates of the depolarizing model over eta");
    sweep->add_option("--qber", sf.qber, "Depolarizing error weight Q");
    sweep->add_option("--p01", sf.p01, "Injected double-click probability");
    sweep->add_option("--eta-min", sf.eta_min, "Smallest efficiency");
    sweep->add_option("--eta-max", sf.eta_max, "Largest efficiency");
    sweep->add_option("--steps", sf.steps, "Number of grid points");
    sweep->add_option("--out", sf.out, "CSV output path, '-' for stdout");

    std::string decoy_path;
    CLI::App* decoy = app.add_subcommand("decoy", "Estimate single-photon rates from decoy intensities");
    decoy->add_option("config", decoy_path, "Config file with key = value lines")->required();

    int n = 3;
    CLI::App* p01 = app.add_subcommand("p01min", "Minimal mean double-click probability for n photons");
    p01->add_option("--n", n, "Photon number, at least 3");

    VerifyFlags vf;
    vf.seed = default_seed();
    CLI::App* verify = app.add_subcommand("verify", "Run the randomized verification suites");
    std::vector<std::string> choices = suite_names();
    choices.insert(choices.begin(), "all");
    verify->add_option("--suite", vf.suite, "Suite name or 'all'")->check(CLI::IsMember(choices));
    verify->add_option("--trials", vf.trials, "Trials per suite")->check(CLI::PositiveNumber);
    verify->add_option("--seed", vf.seed, "Base RNG seed (default from QKDMM_SEED or 7)");
    verify->add_option("--csv", vf.csv, "Also write reports as CSV to this path");

    try {
        std::vector<std::string> args;
        for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitInputError;
    }

    try {
        if (keyrate->parsed()) return cmd_keyrate(kf, out);
        if (sweep->parsed()) return cmd_sweep(sf, out);
        if (decoy->parsed()) return cmd_decoy(decoy_path, out);
        if (p01->parsed()) return cmd_p01min(n, out);
        if (verify->parsed()) return cmd_verify(vf, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
    return kExitInputError;
}

}  // namespace qkdmm
