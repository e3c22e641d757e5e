#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "circlegame/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitCheckFailure = 2;

struct CommonOpts {
    std::string scenario;
    std::string out = "out";
    int grid_points = 0;
    double dt = 0.0;
    double T = 0.0;
    int series_terms = 0;
    bool checks = true;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_scenario = true) {
    auto* s = cmd->add_option("--scenario", opts.scenario, "scenario file (JSON)");
    if (needs_scenario) s->required();
    cmd->add_option("--out", opts.out, "output directory");
    cmd->add_option("--grid-points", opts.grid_points, "override grid resolution");
    cmd->add_option("--dt", opts.dt, "override time step");
    cmd->add_option("--T", opts.T, "override horizon");
    cmd->add_option("--series-terms", opts.series_terms, "override series truncation");
    cmd->add_flag("--check,!--no-check", opts.checks, "run the invariant suite (default on)");
}

circlegame::ScenarioConfig load_with_overrides(const CommonOpts& opts) {
    circlegame::ScenarioConfig c = circlegame::load_scenario(opts.scenario);
    if (opts.grid_points > 0) c = circlegame::with_grid(c, opts.grid_points);
    if (opts.dt > 0.0) c.run.dt = opts.dt;
    if (opts.T > 0.0) c.run.T = opts.T;
    if (opts.series_terms > 0) c.run.series_terms = opts.series_terms;
    return c;
}

void print_checks(const std::vector<circlegame::CheckResult>& checks) {
    for (const circlegame::CheckResult& c : checks) {
        std::printf("%-36s %s  (value %.6g, threshold %.6g)\n", c.name.c_str(),
                    c.pass ? "pass" : "FAIL", c.value, c.threshold);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equilibria of a transboundary-pollution game on the circle"};
    app.require_subcommand(1);

    CommonOpts solve_opts, sim_opts, sweep_opts, frag_opts, val_opts;

    CLI::App* solve = app.add_subcommand("solve", "equilibrium profiles, welfare and steady state");
    add_common(solve, solve_opts);

    CLI::App* simulate = app.add_subcommand("simulate", "integrate the pollution dynamics");
    add_common(simulate, sim_opts);

    CLI::App* sweep = app.add_subcommand("sweep", "re-solve across a parameter range");
    add_common(sweep, sweep_opts);
    std::string sweep_param;
    std::vector<double> sweep_values;
    sweep->add_option("--param", sweep_param, "parameter name (sigma, eta, theta, w_<j>, ...)");
    sweep->add_option("--values", sweep_values, "comma-separated values")->delimiter(',');

    CLI::App* fragment = app.add_subcommand("fragment", "pollution ordering of two partitions");
    add_common(fragment, frag_opts);
    std::string coarse_path;
    fragment->add_option("--coarse", coarse_path, "coarser scenario file")->required();

    CLI::App* validate = app.add_subcommand("validate", "run configuration checks only");
    add_common(validate, val_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) {
            circlegame::ScenarioConfig c = load_with_overrides(val_opts);
            std::printf("ok: %s (%d nodes, %zu players)\n", c.name.c_str(), c.grid.n_points,
                        c.players.size());
            return kExitOk;
        }
        if (*solve) {
            circlegame::ScenarioConfig c = load_with_overrides(solve_opts);
            circlegame::SolveArtifacts a = circlegame::solve_scenario(c, solve_opts.checks);
            circlegame::write_solve_outputs(a, c, solve_opts.out);
            print_checks(a.report.checks);
            std::printf("wrote %s/profiles.csv and report.json\n", solve_opts.out.c_str());
            return a.checks_passed ? kExitOk : kExitCheckFailure;
        }
        if (*simulate) {
            circlegame::ScenarioConfig c = load_with_overrides(sim_opts);
            circlegame::SimulateArtifacts a = circlegame::simulate_scenario(c);
            circlegame::write_trajectory_outputs(a, c, sim_opts.out);
            const double final_gap = a.traj.gap.empty() ? -1.0 : a.traj.gap.back();
            std::printf("wrote %s/trajectory.csv (final sup-distance to steady state: %.3g)\n",
                        sim_opts.out.c_str(), final_gap);
            return kExitOk;
        }
        if (*sweep) {
            circlegame::ScenarioConfig c = load_with_overrides(sweep_opts);
            std::string param = sweep_param;
            std::vector<double> values = sweep_values;
            if (param.empty() && c.sweep) param = c.sweep->parameter;
            if (values.empty() && c.sweep) values = c.sweep->values;
            if (param.empty()) throw std::invalid_argument("sweep: no parameter given (--param)");
            circlegame::run_sweep(c, param, values, sweep_opts.out);
            std::printf("wrote %s/sweep.csv\n", sweep_opts.out.c_str());
            return kExitOk;
        }
        if (*fragment) {
            circlegame::ScenarioConfig fine = load_with_overrides(frag_opts);
            circlegame::ScenarioConfig coarse = circlegame::load_scenario(coarse_path);
            if (frag_opts.grid_points > 0) coarse = circlegame::with_grid(coarse, frag_opts.grid_points);
            const double T = frag_opts.T > 0.0 ? frag_opts.T : fine.run.T;
            circlegame::FragmentationReport rep =
                circlegame::run_fragment(fine, coarse, T, frag_opts.out);
            std::printf("min gap over trajectory: %.3e, at steady state: %.3e -> %s\n",
                        rep.min_gap_trajectory, rep.min_gap_steady, rep.pass ? "pass" : "FAIL");
            return rep.pass ? kExitOk : kExitCheckFailure;
        }
    } catch (const circlegame::ScenarioError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailure;
    }
    return kExitOk;
}
