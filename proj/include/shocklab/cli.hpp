#pragma once
// Configuration ingestion, scenario orchestration and output emission.
//
// One JSON config drives every mode. Unknown keys are rejected with the full
// key path, defaults are filled in deterministically, and every JSON report
// echoes the effective config plus the tool version. Time series go to CSV
// with a fixed column contract; outputs are byte-identical for identical
// configs and seeds.
//
// Exit codes: 0 success, 1 config error, 2 numerical failure (non-finite
// state or positivity-guard trip), 3 certification or acceptance-monitor
// failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "shocklab/certifier.hpp"
#include "shocklab/core.hpp"
#include "shocklab/functionals.hpp"
#include "shocklab/poincare.hpp"
#include "shocklab/profile.hpp"
#include "shocklab/solver.hpp"
#include "shocklab/weight.hpp"

namespace shocklab {

using json = nlohmann::ordered_json;

enum class Mode { Profile, Certify, Simulate, Decay, Poincare, Convergence };

struct RunConfig {
    Mode mode = Mode::Simulate;
    // params
    double p = 3.0, u_minus = 2.0, u_plus = 1.0;
    // grid
    double L = 100.0, dx = 0.05;
    // solver
    double cfl_safety = 0.4, t_end = 200.0, output_every = 0.5;
    // perturbation
    Perturbation perturbation;
    double x0 = 0.0;
    // profile table
    int table_M = 4096;
    double delta_tail = -1.0;  // negative: use the 1e-3 * span default
    // certifier
    std::vector<double> p_list{2.0, 2.5, 3.0, 3.5, 4.0};
    std::vector<std::pair<double, double>> pairs;  // empty: draw `count` seeded pairs
    std::uint64_t cert_seed = 42;
    int cert_count = 20;
    long cert_N = 100000;
    // poincare
    long poincare_count = 1000;
    std::uint64_t poincare_seed = 42;
    long poincare_n = kPoincareDefaultN;
    // output
    std::string out_dir = "out";
    bool emit_csv = true, emit_json = true;
    bool quiet = false;

    json echo;  // effective configuration, embedded in every report
};

namespace cfgdetail {

inline void require_keys(const json& j, const std::string& path,
                         std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw ConfigError("unknown config key: " + path + it.key());
    }
}

inline double num(const json& j, const std::string& path, const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number()) throw ConfigError("config field " + path + key + " must be a number");
    return j[key].get<double>();
}

inline double num_required(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw ConfigError("missing config field " + path + key);
    if (!j[key].is_number()) throw ConfigError("config field " + path + key + " must be a number");
    return j[key].get<double>();
}

}  // namespace cfgdetail

inline Mode mode_from_string(const std::string& s) {
    if (s == "profile") return Mode::Profile;
    if (s == "certify") return Mode::Certify;
    if (s == "simulate") return Mode::Simulate;
    if (s == "decay") return Mode::Decay;
    if (s == "poincare") return Mode::Poincare;
    if (s == "convergence") return Mode::Convergence;
    throw ConfigError("unknown mode: " + s);
}

inline const char* mode_name(Mode m) {
    switch (m) {
        case Mode::Profile: return "profile";
        case Mode::Certify: return "certify";
        case Mode::Simulate: return "simulate";
        case Mode::Decay: return "decay";
        case Mode::Poincare: return "poincare";
        case Mode::Convergence: return "convergence";
    }
    return "?";
}

// Parse + validate a config object; unknown keys anywhere are rejected.
inline RunConfig parse_config(const json& j) {
    using namespace cfgdetail;
    RunConfig cfg;
    require_keys(j, "", {"mode", "params", "grid", "solver", "perturbation", "x0",
                         "profile_table", "certifier", "poincare", "output"});
    if (!j.contains("mode") || !j["mode"].is_string())
        throw ConfigError("config needs a string field 'mode'");
    cfg.mode = mode_from_string(j["mode"].get<std::string>());

    if (j.contains("params")) {
        const json& p = j["params"];
        require_keys(p, "params.", {"p", "u_minus", "u_plus"});
        cfg.p = num_required(p, "params.", "p");
        cfg.u_minus = num_required(p, "params.", "u_minus");
        cfg.u_plus = num_required(p, "params.", "u_plus");
    } else if (cfg.mode == Mode::Simulate || cfg.mode == Mode::Decay ||
               cfg.mode == Mode::Profile) {
        throw ConfigError("mode '" + std::string(mode_name(cfg.mode)) +
                          "' requires a 'params' section");
    }

    if (j.contains("grid")) {
        const json& g = j["grid"];
        require_keys(g, "grid.", {"L", "dx"});
        cfg.L = num(g, "grid.", "L", cfg.L);
        cfg.dx = num(g, "grid.", "dx", cfg.dx);
        if (!(cfg.L > 0.0)) throw ConfigError("grid.L must be positive");
        if (!(cfg.dx > 0.0)) throw ConfigError("grid.dx must be positive");
    }

    if (j.contains("solver")) {
        const json& s = j["solver"];
        require_keys(s, "solver.", {"cfl_safety", "t_end", "output_every"});
        cfg.cfl_safety = num(s, "solver.", "cfl_safety", cfg.cfl_safety);
        cfg.t_end = num(s, "solver.", "t_end", cfg.t_end);
        cfg.output_every = num(s, "solver.", "output_every", cfg.output_every);
        if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0))
            throw ConfigError("solver.cfl_safety must lie in (0, 1]");
        if (cfg.t_end < 0.0) throw ConfigError("solver.t_end must be nonnegative");
    }

    if (j.contains("perturbation")) {
        const json& q = j["perturbation"];
        require_keys(q, "perturbation.", {"kind", "amplitude", "center", "width", "xi", "values"});
        std::string kind = q.contains("kind") ? q["kind"].get<std::string>() : "gaussian";
        if (kind == "gaussian")
            cfg.perturbation.kind = PerturbationKind::Gaussian;
        else if (kind == "bump")
            cfg.perturbation.kind = PerturbationKind::Bump;
        else if (kind == "custom-table")
            cfg.perturbation.kind = PerturbationKind::CustomTable;
        else if (kind == "none")
            cfg.perturbation.kind = PerturbationKind::None;
        else
            throw ConfigError("perturbation.kind must be gaussian|bump|custom-table|none");
        cfg.perturbation.amplitude = num(q, "perturbation.", "amplitude", 0.1);
        cfg.perturbation.center = num(q, "perturbation.", "center", 0.0);
        cfg.perturbation.width = num(q, "perturbation.", "width", 5.0);
        if (cfg.perturbation.kind == PerturbationKind::CustomTable) {
            if (!q.contains("xi") || !q.contains("values"))
                throw ConfigError("custom-table perturbation needs 'xi' and 'values' arrays");
            cfg.perturbation.table_xi = q["xi"].get<std::vector<double>>();
            cfg.perturbation.table_v = q["values"].get<std::vector<double>>();
            if (cfg.perturbation.table_xi.size() != cfg.perturbation.table_v.size() ||
                cfg.perturbation.table_xi.size() < 2)
                throw ConfigError("custom-table perturbation arrays must match, length >= 2");
        }
        if (cfg.perturbation.kind != PerturbationKind::CustomTable &&
            !(cfg.perturbation.width > 0.0))
            throw ConfigError("perturbation.width must be positive");
    }

    if (j.contains("x0")) cfg.x0 = num(j, "", "x0", 0.0);

    if (j.contains("profile_table")) {
        const json& t = j["profile_table"];
        require_keys(t, "profile_table.", {"M", "delta_tail"});
        cfg.table_M = static_cast<int>(num(t, "profile_table.", "M", cfg.table_M));
        cfg.delta_tail = num(t, "profile_table.", "delta_tail", -1.0);
    }

    if (j.contains("certifier")) {
        const json& c = j["certifier"];
        require_keys(c, "certifier.", {"p_list", "pairs", "seed", "count", "N"});
        if (c.contains("p_list")) {
            cfg.p_list = c["p_list"].get<std::vector<double>>();
            if (cfg.p_list.empty()) throw ConfigError("certifier.p_list must be nonempty");
        }
        if (c.contains("pairs")) {
            for (const auto& pr : c["pairs"]) {
                if (!pr.is_array() || pr.size() != 2)
                    throw ConfigError("certifier.pairs entries must be [u_plus, u_minus]");
                cfg.pairs.emplace_back(pr[0].get<double>(), pr[1].get<double>());
            }
            if (cfg.pairs.empty()) throw ConfigError("certifier.pairs must be nonempty");
        }
        cfg.cert_seed = static_cast<std::uint64_t>(num(c, "certifier.", "seed", 42));
        cfg.cert_count = static_cast<int>(num(c, "certifier.", "count", 20));
        cfg.cert_N = static_cast<long>(num(c, "certifier.", "N", 100000));
    }

    if (j.contains("poincare")) {
        const json& q = j["poincare"];
        require_keys(q, "poincare.", {"count", "seed", "n"});
        cfg.poincare_count = static_cast<long>(num(q, "poincare.", "count", 1000));
        cfg.poincare_seed = static_cast<std::uint64_t>(num(q, "poincare.", "seed", 42));
        cfg.poincare_n = static_cast<long>(num(q, "poincare.", "n", kPoincareDefaultN));
    }

    if (j.contains("output")) {
        const json& o = j["output"];
        require_keys(o, "output.", {"directory", "formats"});
        if (o.contains("directory")) cfg.out_dir = o["directory"].get<std::string>();
        if (o.contains("formats")) {
            cfg.emit_csv = false;
            cfg.emit_json = false;
            for (const auto& f : o["formats"]) {
                std::string s = f.get<std::string>();
                if (s == "csv")
                    cfg.emit_csv = true;
                else if (s == "json")
                    cfg.emit_json = true;
                else
                    throw ConfigError("output.formats entries must be 'csv' or 'json'");
            }
        }
    }

    // strict admissibility for anything that integrates the PDE; the
    // certifier sweep admits out-of-range exponents with a warning instead
    if (cfg.mode == Mode::Simulate || cfg.mode == Mode::Decay || cfg.mode == Mode::Profile ||
        cfg.mode == Mode::Convergence) {
        make_shock_params(cfg.p, cfg.u_minus, cfg.u_plus, ParamPolicy::Strict);
    }
    if (cfg.mode == Mode::Decay && cfg.t_end < 50.0)
        throw ConfigError("decay mode needs solver.t_end >= 50 for the rate fit");

    // effective-config echo
    json e;
    e["mode"] = mode_name(cfg.mode);
    e["params"] = {{"p", cfg.p}, {"u_minus", cfg.u_minus}, {"u_plus", cfg.u_plus}};
    e["grid"] = {{"L", cfg.L}, {"dx", cfg.dx}};
    e["solver"] = {{"cfl_safety", cfg.cfl_safety},
                   {"t_end", cfg.t_end},
                   {"output_every", cfg.output_every}};
    const char* kind_names[] = {"gaussian", "bump", "custom-table", "none"};
    e["perturbation"] = {{"kind", kind_names[static_cast<int>(cfg.perturbation.kind)]},
                         {"amplitude", cfg.perturbation.amplitude},
                         {"center", cfg.perturbation.center},
                         {"width", cfg.perturbation.width}};
    e["x0"] = cfg.x0;
    e["profile_table"] = {{"M", cfg.table_M}, {"delta_tail", cfg.delta_tail}};
    e["certifier"] = {{"p_list", cfg.p_list},
                      {"seed", cfg.cert_seed},
                      {"count", cfg.cert_count},
                      {"N", cfg.cert_N}};
    if (!cfg.pairs.empty()) {
        json pj = json::array();
        for (auto& [up, um] : cfg.pairs) pj.push_back({up, um});
        e["certifier"]["pairs"] = pj;
    }
    e["poincare"] = {{"count", cfg.poincare_count},
                     {"seed", cfg.poincare_seed},
                     {"n", cfg.poincare_n}};
    e["output"] = {{"directory", cfg.out_dir},
                   {"formats", json::array()}};
    if (cfg.emit_csv) e["output"]["formats"].push_back("csv");
    if (cfg.emit_json) e["output"]["formats"].push_back("json");
    cfg.echo = e;
    return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(j);
}

// ---------------------------------------------------------------------------
// output helpers
// ---------------------------------------------------------------------------

namespace cfgdetail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json report_skeleton(const RunConfig& cfg) {
    json r;
    r["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    r["config"] = cfg.echo;
    return r;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write output file: " + path.string());
    out << text;
}

inline void write_json_report(const RunConfig& cfg, const std::string& name, const json& body) {
    if (!cfg.emit_json) return;
    write_text(std::filesystem::path(cfg.out_dir) / (name + ".json"), body.dump(2) + "\n");
}

}  // namespace cfgdetail

inline const char* kCsvHeader =
    "t,X,Xdot,E_a,L1,L2,Linf,H1semi,D1,D2,int_D1,int_D2,int_Xdot2,mono_violation";

inline std::string trajectory_csv(const Trajectory& traj) {
    std::string out = kCsvHeader;
    out += '\n';
    using cfgdetail::fmt17;
    for (const auto& r : traj.rows) {
        out += fmt17(r.t) + "," + fmt17(r.X) + "," + fmt17(r.Xdot) + "," + fmt17(r.E_a) + "," +
               fmt17(r.L1) + "," + fmt17(r.L2) + "," + fmt17(r.Linf) + "," + fmt17(r.H1semi) +
               "," + fmt17(r.D1) + "," + fmt17(r.D2) + "," + fmt17(r.int_D1) + "," +
               fmt17(r.int_D2) + "," + fmt17(r.int_Xdot2) + "," + fmt17(r.mono_violation) + "\n";
    }
    return out;
}

inline json certificate_to_json(const CertificateReport& r) {
    json j;
    j["p"] = r.params.p;
    j["u_minus"] = r.params.u_minus;
    j["u_plus"] = r.params.u_plus;
    j["s"] = r.params.s;
    j["beta"] = r.beta;
    j["g_max"] = r.g_max;
    j["g_argmax"] = r.g_argmax;
    j["m_min"] = r.m_min;
    if (std::isnan(r.H_prime_max))
        j["H_prime_max"] = nullptr;
    else
        j["H_prime_max"] = r.H_prime_max;
    j["g_at_u_plus"] = r.g_at_endpoint_plus;
    j["g_at_u_minus"] = r.g_at_endpoint_minus;
    j["a_min"] = r.a_min;
    j["a_max"] = r.a_max;
    j["dual_max_rel_dev"] = r.dual_max_rel_dev;
    j["margins"] = {{"h_left", r.margin_h_left},
                    {"h_right", r.margin_h_right},
                    {"I1", r.margin_I1},
                    {"m", r.margin_m}};
    j["inequalities_ok"] = r.inequalities_ok;
    j["dual_ok"] = r.dual_ok;
    j["converged"] = r.converged;
    j["hypothesis_warning"] = r.params.hypothesis_warning;
    j["pass"] = r.pass;
    j["N"] = r.grid_N;
    json ref = json::array();
    for (auto& [n, g] : r.refinement) ref.push_back({n, g});
    j["refinement"] = ref;
    return j;
}

// ---------------------------------------------------------------------------
// scenarios
// ---------------------------------------------------------------------------

namespace scenario {

inline int profile_mode(const RunConfig& cfg) {
    ShockParams prm = make_shock_params(cfg.p, cfg.u_minus, cfg.u_plus);
    ShockProfile prof = build_profile(prm, cfg.table_M, cfg.delta_tail);
    if (cfg.emit_csv) {
        std::string out = "xi,U,Uxi\n";
        for (std::size_t k = 0; k < prof.table_xi.size(); ++k) {
            out += cfgdetail::fmt17(prof.table_xi[k]) + "," + cfgdetail::fmt17(prof.table_U[k]) +
                   "," + cfgdetail::fmt17(h_of_U(prm, prof.table_U[k])) + "\n";
        }
        cfgdetail::write_text(std::filesystem::path(cfg.out_dir) / "profile.csv", out);
    }
    json rep = cfgdetail::report_skeleton(cfg);
    rep["profile"] = {{"table_size", prof.table_U.size()},
                      {"delta_tail", prof.delta_tail},
                      {"lambda_minus", prof.lambda_minus},
                      {"lambda_plus", prof.lambda_plus},
                      {"xi_left", prof.xi_left()},
                      {"xi_right", prof.xi_right()},
                      {"ode_residual", prof.residual}};
    cfgdetail::write_json_report(cfg, "profile", rep);
    if (!cfg.quiet)
        std::cout << "profile: " << prof.table_U.size() << " nodes, residual " << prof.residual
                  << "\n";
    return 0;
}

inline int certify_mode(const RunConfig& cfg) {
    std::vector<std::pair<double, double>> pairs = cfg.pairs;
    if (pairs.empty()) pairs = random_state_pairs(cfg.cert_count, cfg.cert_seed);
    SweepResult res = sweep(cfg.p_list, pairs, cfg.cert_N);

    json rep = cfgdetail::report_skeleton(cfg);
    json arr = json::array();
    int failed_within = 0;
    int passed = 0;
    for (const auto& e : res.entries) {
        if (e.report) {
            arr.push_back(certificate_to_json(*e.report));
            bool within = !e.report->params.hypothesis_warning;
            if (e.report->pass)
                ++passed;
            else if (within)
                ++failed_within;
        } else {
            json f;
            f["p"] = e.failure->params.p;
            f["u_minus"] = e.failure->params.u_minus;
            f["u_plus"] = e.failure->params.u_plus;
            f["failed"] = true;
            f["witness_U"] = e.failure->witness_U;
            f["g_at_witness"] = e.failure->g_at_witness;
            f["message"] = e.failure->message;
            f["hypothesis_warning"] = e.failure->params.hypothesis_warning;
            arr.push_back(f);
            if (!e.failure->params.hypothesis_warning) ++failed_within;
        }
    }
    rep["reports"] = arr;
    rep["summary"] = {{"total", res.entries.size()},
                      {"passed", passed},
                      {"failed_within_hypotheses", failed_within}};
    cfgdetail::write_json_report(cfg, "certify", rep);
    if (!cfg.quiet)
        std::cout << "certify: " << passed << "/" << res.entries.size() << " pass\n";
    return failed_within > 0 ? 3 : 0;
}

inline Trajectory simulate_common(const RunConfig& cfg, ShockProfile& prof) {
    ShockParams prm = make_shock_params(cfg.p, cfg.u_minus, cfg.u_plus);
    prof = build_profile(prm, cfg.table_M, cfg.delta_tail);
    SolverConfig scfg;
    scfg.params = prm;
    scfg.grid = make_grid_spacing(cfg.L, cfg.dx);
    scfg.cfl_safety = cfg.cfl_safety;
    scfg.t_end = cfg.t_end;
    scfg.output_every = cfg.output_every;
    scfg.perturbation = cfg.perturbation;
    scfg.x0 = cfg.x0;
    return run(scfg, prof);
}

inline json run_summary(const Trajectory& traj) {
    const auto& m = traj.meta;
    const auto& last = traj.rows.back();
    json j;
    j["steps"] = m.steps;
    j["E_a0"] = m.E_a0;
    j["max_step_increment_rel"] = m.max_step_increment_rel;
    j["sum_step_increments_rel"] = m.sum_step_increments_rel;
    j["max_principle_excess"] = m.max_principle_excess;
    j["max_principle_warning"] = m.max_principle_warning;
    j["farfield_worst"] = m.farfield_worst;
    j["farfield_warning"] = m.farfield_warning;
    j["h1_smallness_warning"] = m.h1_smallness_warning;
    j["budget_C0"] = m.budget_C0;
    j["final"] = {{"t", last.t},      {"X", last.X},       {"Xdot", last.Xdot},
                  {"E_a", last.E_a},  {"L2", last.L2},     {"Linf", last.Linf}};
    return j;
}

inline int simulate_mode(const RunConfig& cfg) {
    ShockProfile prof;
    Trajectory traj = simulate_common(cfg, prof);
    if (cfg.emit_csv)
        cfgdetail::write_text(std::filesystem::path(cfg.out_dir) / "simulate.csv",
                              trajectory_csv(traj));
    json rep = cfgdetail::report_skeleton(cfg);
    rep["result"] = run_summary(traj);
    cfgdetail::write_json_report(cfg, "simulate", rep);
    if (!cfg.quiet)
        std::cout << "simulate: " << traj.meta.steps << " steps, final |phi|_inf = "
                  << traj.rows.back().Linf << "\n";
    return 0;
}

inline int decay_mode(const RunConfig& cfg) {
    ShockProfile prof;
    Trajectory traj = simulate_common(cfg, prof);
    if (cfg.emit_csv)
        cfgdetail::write_text(std::filesystem::path(cfg.out_dir) / "decay.csv",
                              trajectory_csv(traj));

    DecayFit fit = decay_fit(traj);
    ShiftBoundReport sb = shift_bound_check(traj, prof);

    double evenness = 0.0;
    for (double tau : {0.5, 1.0, 3.0})
        evenness = std::max(evenness, std::abs(R_of_tau(prof, tau) - R_of_tau(prof, -tau)));

    json rep = cfgdetail::report_skeleton(cfg);
    rep["result"] = run_summary(traj);
    rep["decay"] = {{"C_star", std::isfinite(fit.C_star) ? json(fit.C_star) : json(nullptr)},
                    {"worst_margin", fit.worst_margin},
                    {"sup_t14_L2", fit.sup_t14_L2},
                    {"feasible", fit.feasible},
                    {"note", "fitted constant, empirical stand-in for the analytic one"}};
    rep["shift_bound"] = {{"beta_prime", sb.beta_prime},
                          {"fubini_max_rel_err", sb.fubini_max_rel_err},
                          {"bound_ok_all", sb.bound_ok_all}};
    rep["R_evenness_max_dev"] = evenness;
    cfgdetail::write_json_report(cfg, "decay", rep);

    bool monitors_ok = fit.feasible && fit.worst_margin <= 0.0 && sb.bound_ok_all &&
                       sb.fubini_max_rel_err <= 1e-6 && evenness <= 1e-10;
    if (!cfg.quiet)
        std::cout << "decay: C* = " << fit.C_star << ", worst margin = " << fit.worst_margin
                  << (monitors_ok ? " (ok)" : " (violations)") << "\n";
    return monitors_ok ? 0 : 3;
}

inline int poincare_mode(const RunConfig& cfg) {
    BatteryReport rep = poincare_battery(cfg.poincare_count, cfg.poincare_seed, {},
                                         cfg.poincare_n);
    json out = cfgdetail::report_skeleton(cfg);
    out["report"] = {{"count", rep.count},
                     {"min_gap", rep.min_gap},
                     {"near_equality_count", rep.near_equality_count},
                     {"failures", rep.failures}};
    cfgdetail::write_json_report(cfg, "poincare", out);
    if (!cfg.quiet)
        std::cout << "poincare: " << rep.count << " cases, min gap " << rep.min_gap << "\n";
    return 0;
}

// Steady-profile residual at three spacings; the canonical smoke test.
inline int convergence_mode(const RunConfig& cfg) {
    ShockParams prm = make_shock_params(cfg.p, cfg.u_minus, cfg.u_plus);
    ShockProfile prof = build_profile(prm, cfg.table_M, cfg.delta_tail);
    std::vector<double> spacings{0.1, 0.05, 0.025};
    std::vector<double> residuals;
    for (double dx : spacings) {
        Grid grid = make_grid_spacing(cfg.L, dx);
        SolutionState st;
        st.u.resize(grid.n);
        ProfileSampler sampler(prof);
        for (int i = 0; i < grid.n; ++i) st.u[i] = sampler.value(grid.xi(i));
        st.u[0] = prm.u_minus;
        st.u[grid.n - 1] = prm.u_plus;
        Field r = semidiscrete_rhs(st, prof, prm, grid);
        double rmax = 0.0;
        for (double v : r) rmax = std::max(rmax, std::abs(v));
        residuals.push_back(rmax);
    }
    std::vector<double> orders;
    for (std::size_t k = 0; k + 1 < residuals.size(); ++k)
        orders.push_back(std::log2(residuals[k] / residuals[k + 1]));

    json rep = cfgdetail::report_skeleton(cfg);
    rep["convergence"] = {{"dx", spacings}, {"residual_inf", residuals}, {"orders", orders}};
    cfgdetail::write_json_report(cfg, "convergence", rep);
    double min_order = *std::min_element(orders.begin(), orders.end());
    if (!cfg.quiet) {
        std::cout << "convergence: residuals";
        for (double r : residuals) std::cout << " " << r;
        std::cout << ", orders";
        for (double o : orders) std::cout << " " << o;
        std::cout << "\n";
    }
    return min_order >= 1.9 ? 0 : 3;
}

}  // namespace scenario

// Dispatch a validated config; every failure also leaves a JSON error record.
inline int run_scenario(const RunConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    auto record_error = [&cfg](const char* type, const std::string& msg, double t = std::numeric_limits<double>::quiet_NaN()) {
        json rep = cfgdetail::report_skeleton(cfg);
        rep["error"] = {{"type", type}, {"message", msg}};
        if (!std::isnan(t)) rep["error"]["time"] = t;
        try {
            cfgdetail::write_text(std::filesystem::path(cfg.out_dir) / "error.json",
                                  rep.dump(2) + "\n");
        } catch (...) {
        }
        if (!cfg.quiet) std::cerr << "error (" << type << "): " << msg << "\n";
    };

    try {
        switch (cfg.mode) {
            case Mode::Profile: return scenario::profile_mode(cfg);
            case Mode::Certify: return scenario::certify_mode(cfg);
            case Mode::Simulate: return scenario::simulate_mode(cfg);
            case Mode::Decay: return scenario::decay_mode(cfg);
            case Mode::Poincare: return scenario::poincare_mode(cfg);
            case Mode::Convergence: return scenario::convergence_mode(cfg);
        }
    } catch (const ConfigError& e) {
        record_error("ConfigError", e.what());
        return 1;
    } catch (const NonFinite& e) {
        record_error("NonFinite", e.what(), e.t);
        return 2;
    } catch (const NonPositiveBase& e) {
        record_error("NonPositiveBase", e.what(), e.t);
        return 2;
    } catch (const InsufficientSpan& e) {
        record_error("InsufficientSpan", e.what());
        return 1;
    } catch (const BatteryFailure& e) {
        record_error("BatteryFailure", std::string(e.what()) + " witness=" + e.witness_json);
        return 3;
    } catch (const CertificationFailed& e) {
        record_error("CertificationFailed", e.what());
        return 3;
    } catch (const Error& e) {
        record_error("Error", e.what());
        return 2;
    }
    return 0;
}

}  // namespace shocklab
