// Copyright 2026 The bosonverify Authors
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

#pragma once

// Command-line front end. Exit codes:
//   0  command completed (verdicts do not affect the code)
//   1  file, parse or I/O error; numeric failure
//   2  configuration invariant violated or resource guard tripped
//   3  a check run by `lemmas` failed

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bosonverify/channels.hpp"
#include "bosonverify/fock.hpp"
#include "bosonverify/gaussian.hpp"
#include "bosonverify/measurement.hpp"
#include "bosonverify/protocols.hpp"
#include "bosonverify/serialization.hpp"

namespace bosonverify::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCheckFailed = 3;

/// Two-mode Fock matrices are capped at this dimension.
inline constexpr int kMaxFockDim = 4096;

struct Scenario {
    std::string name = "scenario";
    VerificationConfig cfg;
    std::optional<ProverChannel> prover;
    std::optional<GaussianState> prover_state;
    int repetitions = 1;
    std::uint64_t seed = 1;
    std::int64_t mc_samples = 100000;
    int fock_cutoff = 24;
    std::vector<double> sweep_grid;
};

inline void to_json(json& j, const Scenario& s) {
    j = json{{"name", s.name}, {"config", s.cfg}, {"repetitions", s.repetitions}, {"seed", s.seed}};
    if (s.prover) j["prover"] = *s.prover;
    if (s.prover_state) j["prover_state"] = *s.prover_state;
    j["output"] = json{{"mc_samples", s.mc_samples}, {"fock_cutoff", s.fock_cutoff}, {"sweep_grid", s.sweep_grid}};
}

/// Structural problems (missing keys, wrong JSON types) propagate as
/// nlohmann exceptions; domain violations as InvariantError/DimensionError.
inline Scenario scenario_from_json(const json& j) {
    Scenario s;
    s.name = j.value("name", std::string("scenario"));
    s.cfg = j.at("config").get<VerificationConfig>();
    if (j.contains("prover")) s.prover = j.at("prover").get<ProverChannel>();
    if (j.contains("prover_state")) s.prover_state = j.at("prover_state").get<GaussianState>();
    s.repetitions = j.value("repetitions", 1);
    s.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("output")) {
        const json& o = j.at("output");
        s.mc_samples = o.value("mc_samples", s.mc_samples);
        s.fock_cutoff = o.value("fock_cutoff", s.fock_cutoff);
        if (o.contains("sweep_grid")) s.sweep_grid = o.at("sweep_grid").get<std::vector<double>>();
    }
    require(s.repetitions >= 1, "repetitions must be positive");
    require(s.mc_samples >= 2, "mc_samples must be at least 2");
    require(s.fock_cutoff >= 2, "fock_cutoff must be at least 2");
    validate(s.cfg);
    const bool state_target = std::holds_alternative<PureStateTarget>(s.cfg.target);
    if (state_target) {
        require(s.prover_state.has_value(), "a pure-state target needs a 'prover_state'");
        require_dims(s.prover_state->modes() == target_modes(s.cfg.target), "prover_state has the wrong mode count");
    } else {
        require(s.prover.has_value(), "a channel target needs a 'prover'");
        realize(*s.prover, target_modes(s.cfg.target));  // domain and CP checks
    }
    return s;
}

struct ParseFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Scenario load_scenario(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseFailure("cannot open scenario file '" + path + "'");
    json j;
    try {
        j = json::parse(is);
    } catch (const json::exception& e) {
        throw ParseFailure(std::string("malformed JSON: ") + e.what());
    }
    try {
        return scenario_from_json(j);
    } catch (const json::exception& e) {
        throw ParseFailure(std::string("scenario structure: ") + e.what());
    }
}

inline void check_fock_guard(int cutoff) {
    if (static_cast<long long>(cutoff) * cutoff > kMaxFockDim)
        throw InvariantError("resource guard: two-mode Fock dimension " + std::to_string(cutoff * cutoff) +
                             " exceeds " + std::to_string(kMaxFockDim));
}

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    std::string out_dir;
    std::string format = "json";
    int plan_m = 1;
    int lemma_cutoff = 30;
    int oracle_cutoff = 14;
    std::vector<double> thetas{0.1, 0.5, 1.0, 2.0};
};

/// Writes `text` to out_dir/file when --out is given, else to `out`.
inline void emit(const Options& opt, const std::string& file, const std::string& text, std::ostream& out) {
    if (opt.out_dir.empty()) {
        out << text;
        return;
    }
    std::filesystem::create_directories(opt.out_dir);
    const auto path = std::filesystem::path(opt.out_dir) / file;
    std::ofstream os(path);
    if (!os) throw ParseFailure("cannot write " + path.string());
    os << text;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

inline json verify_report(const Scenario& s, std::uint64_t seed, int reps) {
    const auto start = std::chrono::steady_clock::now();
    json verdicts = json::array();
    int accepted = 0;
    for (int r = 0; r < reps; ++r) {
        const std::uint64_t rs = derive_seed(seed, static_cast<std::uint64_t>(r));
        const Verdict v = s.prover_state ? run_state_verification(*s.prover_state, s.cfg, rs)
                                         : run_verification(*s.prover, s.cfg, rs);
        accepted += v.accepted ? 1 : 0;
        json jv = v;
        jv["config"] = s.cfg;
        jv["repetition"] = r;
        verdicts.push_back(std::move(jv));
    }
    json rep{{"command", "verify"},
             {"scenario", s},
             {"seed", seed},
             {"repetitions", reps},
             {"accepted", accepted},
             {"accept_rate", static_cast<double>(accepted) / reps},
             {"verdicts", verdicts}};
    rep["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    return rep;
}

inline std::string verify_csv(const json& rep) {
    std::ostringstream os;
    os.precision(17);
    os << "repetition,seed,omega_star,threshold,accepted\n";
    for (const auto& v : rep.at("verdicts"))
        os << v.at("repetition").get<int>() << ',' << v.at("seed").get<std::uint64_t>() << ','
           << v.at("omega_star").get<double>() << ',' << v.at("threshold").get<double>() << ','
           << (v.at("accepted").get<bool>() ? 1 : 0) << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

/// tr[W (𝓔⊗𝓘)(|κ⟩⟨κ|)] from the Fock oracle for single-mode channel targets.
inline double fock_omega(const GaussianChannel& ch, const Target& target, double lambda, int cutoff) {
    check_fock_guard(cutoff);
    const FockState rho = gaussian_to_fock(probe_state(ch, 1, lambda), cutoff);
    if (const auto* u = std::get_if<UnitaryTarget>(&target)) return expectation(witness_fock_unitary(u->spec, lambda, cutoff), rho);
    const double g = std::get<AmplificationTarget>(target).gain;
    return expectation(witness_fock_amp(g, lambda, cutoff), rho);
}

inline json oracle_report(const Scenario& s, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    json rep{{"command", "oracle"}, {"scenario", s}, {"seed", seed}};
    if (const auto* t = std::get_if<PureStateTarget>(&s.cfg.target)) {
        const GaussianState target = apply_unitary(vacuum(t->spec.modes()), t->spec);
        const double f = overlap_pure(target, *s.prover_state);
        const double w = analytic_omega_state(*s.prover_state, t->spec);
        rep["true_fidelity"] = {{"estimate", f}, {"std_error", 0.0}};
        rep["analytic_omega"] = w;
        rep["fock_omega"] = nullptr;
        rep["witness_below_fidelity"] = w <= f + 1e-12;
    } else {
        const int m = target_modes(s.cfg.target);
        const GaussianChannel ch = realize(*s.prover, m);
        const FidelityEstimate f = true_average_fidelity(ch, s.cfg.target, s.cfg.lambda, s.mc_samples, seed);
        const double w = analytic_omega(ch, s.cfg.target, s.cfg.lambda);
        rep["true_fidelity"] = {{"estimate", f.estimate}, {"std_error", f.std_error}};
        rep["analytic_omega"] = w;
        rep["fock_omega"] = m == 1 ? json(fock_omega(ch, s.cfg.target, s.cfg.lambda, s.fock_cutoff)) : json(nullptr);
        rep["witness_below_fidelity"] = w <= f.estimate + 3.0 * f.std_error;
    }
    rep["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    return rep;
}

// ---------------------------------------------------------------------------
// lemmas
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

inline void to_json(json& j, const CheckResult& c) {
    j = json{{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"tolerance", c.tolerance}, {"detail", c.detail}};
}

inline std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(6) << x;
    return os.str();
}

/// Lemma 2 at `cutoff` over the θ grid, Lemma 1 and the two witness theorems at `oracle_cutoff`.
inline std::vector<CheckResult> lemma_suite(int cutoff, int oracle_cutoff, const std::vector<double>& thetas) {
    std::vector<CheckResult> out;
    for (double th : thetas) {
        for (int m : {1, 2}) {
            if (m == 2) check_fock_guard(cutoff);
            const FockOperator op = lemma2_operator(th, m, cutoff);
            const double mn = min_eigenvalue(op.matrix);
            // equality exactly on total photon number 0 and 1
            double eq_dev = 0.0;
            double strict_min = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < op.dim(); ++i) {
                Eigen::Index rest = i;
                int total = 0;
                for (int k = 0; k < m; ++k) {
                    total += static_cast<int>(rest % cutoff);
                    rest /= cutoff;
                }
                const double d = op.matrix(i, i).real();
                if (total <= 1) eq_dev = std::max(eq_dev, std::abs(d));
                else strict_min = std::min(strict_min, d);
            }
            const bool ok = mn >= -1e-10 && eq_dev <= 1e-12 && (th == 0.0 || strict_min > 0.0);
            out.push_back({"lemma2 theta=" + fmt(th) + " m=" + std::to_string(m), ok, mn, 1e-10,
                           "min eigenvalue " + fmt(mn) + ", sector {0,1} deviation " + fmt(eq_dev)});
        }
    }
    check_fock_guard(oracle_cutoff);
    const int quad = oracle_cutoff + 8;
    for (double g : {1.0, 2.0}) {
        const double lambda = 1.0;
        const FockOperator o = canonical_observable(g, lambda, oracle_cutoff, quad);
        const FockOperator cf = lemma1_closed_form(g, lambda, oracle_cutoff);
        const double dev = max_abs(o.matrix - cf.matrix);
        out.push_back({"lemma1 lambda=1 g=" + fmt(g), dev <= 1e-3, dev, 1e-3, "max entry deviation " + fmt(dev)});
    }
    {
        const double lambda = 1.0;
        for (const SymplecticSpec& spec : {SymplecticSpec::identity(1), compose(phase_rotation(0.4), single_mode_squeezer(0.2))}) {
            const FockOperator w = witness_fock_unitary(spec, lambda, oracle_cutoff);
            const FockOperator o = observable_fock_unitary(spec, lambda, oracle_cutoff);
            const double top = max_eigenvalue(w.matrix - o.matrix);
            out.push_back({"theorem1 witness below observable (r=" + fmt(std::log(spectral_norm(spec))) + ")", top <= 1e-6,
                           top, 1e-6, "max eigenvalue of W - O " + fmt(top)});
        }
        const int c = std::max(oracle_cutoff, 20);
        check_fock_guard(c);
        const double val = fock_omega(GaussianChannel::identity(1), UnitaryTarget{SymplecticSpec::identity(1)}, lambda, c);
        out.push_back({"theorem1 honest value", std::abs(val - 1.0) <= 1e-3, val, 1e-3, "tr[W rho] = " + fmt(val)});
    }
    {
        const double lambda = 1.0;
        const double g = 3.0;
        const FockOperator w = witness_fock_amp(g, lambda, oracle_cutoff);
        const FockOperator o = lemma1_closed_form(g, lambda, oracle_cutoff);
        const double top = max_eigenvalue(w.matrix - o.matrix);
        out.push_back({"theorem2 witness below observable (g=3)", top <= 1e-6, top, 1e-6,
                       "max eigenvalue of W - O " + fmt(top)});
        const double g2 = 2.0;
        const int c = std::max(oracle_cutoff, 24);
        check_fock_guard(c);
        const double val = fock_omega(realize(optimal_amplifier(g2, lambda), 1), AmplificationTarget{g2}, lambda, c);
        const double expect = max_amplification_fidelity(g2, lambda);
        out.push_back({"theorem2 optimal value (g=2)", std::abs(val - expect) <= 1e-3, val, 1e-3,
                       "tr[W rho] = " + fmt(val) + ", expected " + fmt(expect)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// budget, plan, sweep
// ---------------------------------------------------------------------------

inline SampleBudget budget_for(const VerificationConfig& cfg) {
    validate(cfg);
    const int m = target_modes(cfg.target);
    if (std::holds_alternative<AmplificationTarget>(cfg.target)) return sample_budget_amplification(cfg);
    if (std::holds_alternative<PureStateTarget>(cfg.target)) return sample_budget_state(cfg, m);
    return sample_budget_unitary(cfg, m);
}

inline std::string budget_table(const SampleBudget& b) {
    std::ostringstream os;
    os << "group  observables  epsilon        delta          bound              count\n";
    for (const auto& g : b.groups)
        os << std::left << std::setw(7) << g.name << std::setw(13) << g.observables << std::setw(15) << fmt(g.epsilon)
           << std::setw(15) << fmt(g.delta) << std::setw(19) << fmt(g.bound) << g.count << '\n';
    os << "channel uses: " << b.channel_uses << "\n";
    if (b.protocol != "state") os << "TMSV copies: " << b.tmsv_copies << "\n";
    return os.str();
}

inline std::string plan_text(const MeasurementPlan& p) {
    std::ostringstream os;
    os << "m = " << p.m << ", " << p.settings.size() << " local settings\n";
    for (std::size_t i = 0; i < p.settings.size(); ++i) {
        os << "  [" << i << "] " << p.settings[i].label << ":";
        for (int j = 0; j < p.settings[i].modes(); ++j) {
            const auto& a = p.settings[i].angles[static_cast<std::size_t>(j)];
            if (a) os << ' ' << (j < p.m ? "A" : "R") << (j < p.m ? j : j - p.m) << '@' << fmt(*a);
        }
        os << '\n';
    }
    return os.str();
}

inline json sweep_report(const Scenario& s, std::uint64_t seed, int reps) {
    const auto start = std::chrono::steady_clock::now();
    require(!std::holds_alternative<PureStateTarget>(s.cfg.target), "sweep supports channel targets only");
    std::vector<double> grid = s.sweep_grid;
    if (grid.empty()) grid = {0.0, 0.025, 0.05, 0.075, 0.1, 0.125, 0.15, 0.2};
    const int m = target_modes(s.cfg.target);
    json rows = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = grid[i];
        require(v >= 0.0, "sweep grid values must be non-negative");
        ProverChannel p;
        if (const auto* u = std::get_if<UnitaryTarget>(&s.cfg.target)) p = NoisyUnitary{u->spec, v};
        else {
            const double g = std::get<AmplificationTarget>(s.cfg.target).gain;
            p = NoisyAmplifier{g >= s.cfg.lambda + 1.0 ? g / (s.cfg.lambda + 1.0) : 1.0, v};
        }
        const GaussianChannel ch = realize(p, m);
        const FidelityEstimate f = true_average_fidelity(ch, s.cfg.target, s.cfg.lambda, s.mc_samples, seed);
        const double w = analytic_omega(ch, s.cfg.target, s.cfg.lambda);
        int acc = 0;
        for (int r = 0; r < reps; ++r)
            acc += run_verification(p, s.cfg, derive_seed(seed, i, static_cast<std::uint64_t>(r))).accepted ? 1 : 0;
        rows.push_back({{"excess", v},
                        {"true_fidelity", f.estimate},
                        {"std_error", f.std_error},
                        {"analytic_omega", w},
                        {"accept_rate", static_cast<double>(acc) / reps}});
    }
    json rep{{"command", "sweep"}, {"scenario", s}, {"seed", seed}, {"repetitions", reps}, {"rows", rows}};
    rep["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    return rep;
}

inline std::string sweep_csv(const json& rep) {
    std::ostringstream os;
    os.precision(17);
    os << "excess,true_fidelity,std_error,analytic_omega,accept_rate\n";
    for (const auto& r : rep.at("rows"))
        os << r.at("excess").get<double>() << ',' << r.at("true_fidelity").get<double>() << ','
           << r.at("std_error").get<double>() << ',' << r.at("analytic_omega").get<double>() << ','
           << r.at("accept_rate").get<double>() << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"bosonverify: average-fidelity witness verification of bosonic channels"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", opt.config, "scenario JSON file");
        if (needs_config) c->required();
        sub->add_option("--seed", opt.seed, "master seed (overrides the scenario)");
        sub->add_option("--reps", opt.reps, "repetitions (overrides the scenario)")->check(CLI::PositiveNumber);
        sub->add_option("--out", opt.out_dir, "directory for reports (default: stdout)");
        sub->add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    };
    auto* verify = app.add_subcommand("verify", "run the verification protocol");
    add_common(verify, true);
    auto* oracle = app.add_subcommand("oracle", "true fidelity, analytic and Fock-oracle witness values");
    add_common(oracle, true);
    auto* plan = app.add_subcommand("plan", "homodyne measurement plan for an m-mode unitary target");
    add_common(plan, false);
    plan->add_option("--m", opt.plan_m, "number of modes")->check(CLI::PositiveNumber);
    auto* lemmas = app.add_subcommand("lemmas", "Fock-space lemma and witness suites");
    add_common(lemmas, false);
    lemmas->add_option("--cutoff", opt.lemma_cutoff, "cutoff for the Lemma 2 suite")->check(CLI::Range(2, 1000));
    lemmas->add_option("--oracle-cutoff", opt.oracle_cutoff, "cutoff for the observable and witness checks")
        ->check(CLI::Range(2, 1000));
    lemmas->add_option("--thetas", opt.thetas, "squeezing grid for Lemma 2");
    auto* budget = app.add_subcommand("budget", "sample budget table for a configuration");
    add_common(budget, true);
    auto* sweep = app.add_subcommand("sweep", "accept rate and witness versus excess noise");
    add_common(sweep, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitParse;
    }

    try {
        if (*plan) {
            const MeasurementPlan p = build_measurement_plan(opt.plan_m);
            json j = p;
            j["command"] = "plan";
            j["missing"] = verify_plan_coverage(p).size();
            if (opt.out_dir.empty()) out << plan_text(p);
            emit(opt, "plan.json", dump(j), out);
            return kExitOk;
        }
        if (*lemmas) {
            const auto start = std::chrono::steady_clock::now();
            check_fock_guard(opt.oracle_cutoff);
            const auto checks = lemma_suite(opt.lemma_cutoff, opt.oracle_cutoff, opt.thetas);
            bool all = true;
            for (const auto& c : checks) all = all && c.pass;
            json j{{"command", "lemmas"},
                   {"cutoff", opt.lemma_cutoff},
                   {"oracle_cutoff", opt.oracle_cutoff},
                   {"thetas", opt.thetas},
                   {"checks", checks},
                   {"all_pass", all}};
            j["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
            for (const auto& c : checks) err << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
            emit(opt, "lemmas.json", dump(j), out);
            return all ? kExitOk : kExitCheckFailed;
        }

        Scenario s = load_scenario(opt.config);
        const std::uint64_t seed = opt.seed.value_or(s.seed);
        const int reps = opt.reps.value_or(s.repetitions);
        if (*verify) {
            const json rep = verify_report(s, seed, reps);
            if (opt.format == "csv") emit(opt, s.name + ".verify.csv", verify_csv(rep), out);
            else emit(opt, s.name + ".verify.json", dump(rep), out);
        } else if (*oracle) {
            emit(opt, s.name + ".oracle.json", dump(oracle_report(s, seed)), out);
        } else if (*budget) {
            const SampleBudget b = budget_for(s.cfg);
            if (opt.format == "csv") emit(opt, s.name + ".budget.txt", budget_table(b), out);
            else emit(opt, s.name + ".budget.json", dump(json{{"command", "budget"}, {"scenario", s}, {"budget", b}}), out);
        } else if (*sweep) {
            const json rep = sweep_report(s, seed, reps);
            if (opt.format == "csv") emit(opt, s.name + ".sweep.csv", sweep_csv(rep), out);
            else emit(opt, s.name + ".sweep.json", dump(rep), out);
        }
        return kExitOk;
    } catch (const ParseFailure& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const InvariantError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DimensionError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kExitParse;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    }
}

}  // namespace bosonverify::cli
