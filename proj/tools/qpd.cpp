// qpd: quasi-probability distributions from the command line.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "qpd/cli.hpp"

namespace cli = qpd::cli;

int main(int argc, char** argv) {
    CLI::App app{"Quasi-probability distributions on a truncated Fock space"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<int> dim;
    std::optional<double> hbar, lambda;
    std::string grid, out, format;
    std::vector<std::string> tols;
    app.add_option("--config", config_path, "key = value config file (default: $QPD_CONFIG)");
    app.add_option("--dim", dim, "Fock truncation, 2..4096");
    app.add_option("--hbar", hbar, "hbar of the ladder convention");
    app.add_option("--lambda", lambda, "lambda of the ladder convention");
    app.add_option("--grid", grid, "qmin:qmax:nq,pmin:pmax:np");
    app.add_option("--out", out, "output path");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--tol", tols, "name=value tolerance override")->take_all()->allow_extra_args(false);

    std::string state, suite = "all", channel, target, query, cohen;
    std::optional<double> s;

    auto* c_state = app.add_subcommand("state", "build a state and report its properties");
    c_state->add_option("state", state, "state spec, e.g. coherent:1.0")->required();

    auto* c_dist = app.add_subcommand("dist", "evaluate a distribution on the grid");
    c_dist->add_option("state", state, "state spec")->required();
    c_dist->add_option("--s", s, "s parameter: -1 Husimi, 0 Wigner, 1 P");
    c_dist->add_option("--cohen", cohen, "Cohen kernel: identity, matched, gaussian:<sigma>");

    auto* c_amp = app.add_subcommand("amplify", "send a state's Husimi function through the amplifier");
    c_amp->add_option("state", state, "state spec")->required();
    c_amp->add_option("--channel", channel, "gamma=..,n0=..,n1=..,t=..")->required();
    c_amp->add_option("--target-grid", target, "output grid qmin:qmax:nq,pmin:pmax:np (default: input grid scaled by G)");

    auto* c_mom = app.add_subcommand("moment", "closed-form moment integral with a quadrature cross-check");
    c_mom->add_option("query", query, "N,M,alpha,G,m")->required();

    auto* c_ver = app.add_subcommand("verify", "run the self-check suites");
    c_ver->add_option("suite", suite, "algebra, distributions, smoothing, amplifier, moments or all");

    CLI11_PARSE(app, argc, argv);

    return cli::guarded(std::cout, [&]() -> int {
        cli::RunConfig cfg;
        if (config_path.empty())
            if (const char* env = std::getenv(cli::kConfigEnv)) config_path = env;
        if (!config_path.empty()) cli::apply_config_file(cfg, config_path);
        if (dim) cfg.dim = *dim;
        if (hbar) cfg.convention.hbar = *hbar;
        if (lambda) cfg.convention.lambda = *lambda;
        if (!grid.empty()) cfg.grid = cli::parse_grid(grid);
        if (!out.empty()) cfg.out = out;
        if (!format.empty()) cfg.format = qpd::parse_grid_format(format);
        for (const auto& t : tols) cli::apply_tolerance(cfg, t);

        if (*c_state) return cli::cmd_state(state, cfg, std::cout);
        if (*c_dist) {
            cli::DistRequest req;
            req.s = s;
            if (!cohen.empty()) req.cohen = cohen;
            return cli::cmd_dist(state, req, cfg, std::cout);
        }
        if (*c_amp) {
            std::optional<qpd::PhaseGrid> tg;
            if (!target.empty()) tg = cli::parse_grid(target);
            return cli::cmd_amplify(state, channel, tg, cfg, std::cout);
        }
        if (*c_mom) return cli::cmd_moment(query, cfg, std::cout);
        return cli::cmd_verify(suite, cfg, std::cout);
    });
}
