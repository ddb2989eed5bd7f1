// shocklab command-line driver.
//
// Subcommands: profile, certify, simulate, decay, poincare, convergence.
// Each takes an optional JSON config (--config); flags override the output
// directory, seeds and verbosity. Exit codes: 0 ok, 1 config error,
// 2 numerical failure, 3 certification/monitor failure.

#include <CLI11.hpp>

#include "shocklab/shocklab.hpp"

namespace {

constexpr const char* kDefaultsNote =
    "Defaults: params p=3, u_minus=2, u_plus=1; grid L=100, dx=0.05; solver "
    "cfl_safety=0.4, t_end=200, output_every=0.5; perturbation gaussian with "
    "amplitude=0.1, center=0, width=5; x0=0; profile_table M=4096, "
    "delta_tail=1e-3*(u_minus-u_plus); certifier p_list={2,2.5,3,3.5,4}, "
    "seed=42, count=20, N=100000; poincare count=1000, seed=42, n=131072; "
    "output directory 'out', formats csv+json. SHOCKLAB_THREADS caps sweep "
    "parallelism.";

struct Cli {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool quiet = false;
};

int run_mode(const Cli& cli, shocklab::Mode mode) {
    shocklab::RunConfig cfg;
    try {
        if (!cli.config_path.empty()) {
            cfg = shocklab::parse_config_file(cli.config_path);
            if (cfg.mode != mode)
                cfg = shocklab::parse_config([&] {
                    std::ifstream in(cli.config_path);
                    shocklab::json j;
                    in >> j;
                    j["mode"] = shocklab::mode_name(mode);  // subcommand wins
                    return j;
                }());
        } else {
            shocklab::json j;
            j["mode"] = shocklab::mode_name(mode);
            j["params"] = {{"p", 3.0}, {"u_minus", 2.0}, {"u_plus", 1.0}};
            cfg = shocklab::parse_config(j);
        }
        if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
        if (cli.seed_set) {
            cfg.cert_seed = cli.seed;
            cfg.poincare_seed = cli.seed;
            cfg.echo["certifier"]["seed"] = cli.seed;
            cfg.echo["poincare"]["seed"] = cli.seed;
        }
        cfg.quiet = cli.quiet;
        cfg.echo["output"]["directory"] = cfg.out_dir;
    } catch (const shocklab::Error& e) {
        std::cerr << "error (ConfigError): " << e.what() << "\n";
        return 1;
    }
    return shocklab::run_scenario(cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("shocklab ") + shocklab::kToolVersion +
                 " - viscous shock contraction laboratory\n" + kDefaultsNote};
    app.require_subcommand(1);

    Cli cli;
    app.add_option("--config", cli.config_path, "JSON configuration file")->expected(1);
    app.add_option("--out", cli.out_dir, "output directory (overrides config)");
    app.add_option("--seed", cli.seed, "seed override for certifier/poincare")
        ->each([&cli](const std::string&) { cli.seed_set = true; });
    app.add_flag("--quiet", cli.quiet, "suppress progress output");

    std::pair<const char*, shocklab::Mode> modes[] = {
        {"profile", shocklab::Mode::Profile},         {"certify", shocklab::Mode::Certify},
        {"simulate", shocklab::Mode::Simulate},       {"decay", shocklab::Mode::Decay},
        {"poincare", shocklab::Mode::Poincare},       {"convergence", shocklab::Mode::Convergence},
    };
    for (auto& [name, mode] : modes) app.add_subcommand(name, "")->fallthrough();
    app.get_subcommand("profile")->description("emit the shock profile table as CSV");
    app.get_subcommand("certify")->description("certify g(U) <= -beta < 0 over a parameter sweep");
    app.get_subcommand("simulate")->description("evolve a perturbed shock and its shift");
    app.get_subcommand("decay")->description("simulate plus decay-rate and shift-bound checks");
    app.get_subcommand("poincare")->description("weighted Poincare inequality battery");
    app.get_subcommand("convergence")->description("steady-profile residual order study");

    CLI11_PARSE(app, argc, argv);

    for (auto& [name, mode] : modes)
        if (app.got_subcommand(name)) return run_mode(cli, mode);
    return 1;
}
