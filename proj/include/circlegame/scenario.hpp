#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "circlegame/domain.hpp"
#include "circlegame/dynamics.hpp"
#include "circlegame/equilibrium.hpp"

namespace circlegame {

/// Carries every validation failure found in a scenario file, not just the first.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

private:
    std::vector<std::string> issues_;
};

/// Piecewise-constant field description, kept so a config can be re-sampled
/// on a different grid.
struct PiecewiseSpec {
    double fallback = 0.0;
    std::vector<std::pair<Arc, double>> segments;

    SpatialField sample_on(const CircleGrid& grid) const;
    bool is_constant() const;
};

struct RunControls {
    double dt = 0.01;
    double T = 60.0;
    int series_terms = 64;
    int n_samples = 120;
    double alpha_residual_tol = 1e-8;
    double steady_match_tol = 1e-4;
    double ordering_slack = 1e-10;
    double series_gap_tol = 1e-4;
};

struct SweepSpec {
    std::string parameter;
    std::vector<double> values;
};

struct ScenarioConfig {
    std::string name;
    CircleGrid grid;
    EnvironmentSpec env;
    Partition partition;
    std::vector<PlayerSpec> players;
    SpatialField p0;
    RunControls run;
    std::vector<std::string> checks;
    std::optional<SweepSpec> sweep;

    // Sources for re-sampling when the grid or a swept parameter changes.
    PiecewiseSpec delta_spec, v_spec, p0_spec;
    std::vector<PiecewiseSpec> w_specs, A_specs;

    /// Per-player constant w plus constant delta and v: the closed-form series applies.
    bool constant_coefficients() const;
    bool homogeneous_preferences() const;
};

ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig load_scenario_text(const std::string& text, const std::string& name);

/// Same scenario on a different resolution.
ScenarioConfig with_grid(const ScenarioConfig& base, int n_points);

/// Copy of the config with one scalar parameter replaced. Accepted names:
/// sigma, eta, theta, v, and per-player rho_<j>, gamma_<j>, w_<j>, A_<j> (1-based).
ScenarioConfig apply_parameter(const ScenarioConfig& base, const std::string& name, double value);

/// "pi", "2*pi", "3*pi/2", "pi/2", or a plain number.
std::optional<double> parse_pi_expr(const std::string& text);

// ---- reporting ----

struct FieldStats {
    double min = 0.0, max = 0.0, mean = 0.0;
    bool operator==(const FieldStats&) const = default;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    bool operator==(const CheckResult&) const = default;
};

struct PlayerReport {
    int index = 0;
    double alpha_min = 0.0, alpha_max = 0.0, alpha_residual = 0.0;
    double q = 0.0, alpha_inner = 0.0, v = 0.0;
    FieldStats i, b, n, y, c;
    bool operator==(const PlayerReport&) const = default;
};

struct SteadyReport {
    FieldStats p;
    double residual = 0.0;
    double mass_balance_gap = 0.0;
    bool operator==(const SteadyReport&) const = default;
};

struct RunReport {
    std::string scenario;
    int n_points = 0;
    std::vector<PlayerReport> players;
    bool has_cooperative = false;
    double coop_residual = 0.0, coop_q = 0.0, coop_alpha_inner = 0.0, coop_v = 0.0;
    FieldStats coop_alpha;
    SteadyReport steady;
    std::optional<SteadyReport> steady_coop;
    std::vector<CheckResult> checks;
    std::map<std::string, double> timings_ms;
    bool operator==(const RunReport&) const = default;
};

std::string run_report_to_json(const RunReport& report);
RunReport run_report_from_json(const std::string& text);

// ---- pipelines ----

struct SolveArtifacts {
    std::vector<AlphaProfile> alphas;
    std::vector<PlayerProfile> player_profiles;
    EquilibriumProfile nash;
    SpatialField nash_solver_n;
    SteadyState steady;
    std::optional<CooperativeSolution> coop;
    std::optional<SteadyState> steady_coop;
    std::vector<PlayerProfile> zero_diff;
    EquilibriumProfile zero_diff_global;
    WelfareReport welfare_report;
    RunReport report;
    bool checks_passed = true;
};

SolveArtifacts solve_scenario(const ScenarioConfig& config, bool run_checks);

/// Writes profiles.csv and report.json under out_dir (created if missing).
void write_solve_outputs(const SolveArtifacts& artifacts, const ScenarioConfig& config,
                         const std::string& out_dir);

struct SimulateArtifacts {
    Trajectory traj;
    std::optional<SpatialField> p_inf;
};

SimulateArtifacts simulate_scenario(const ScenarioConfig& config);
void write_trajectory_outputs(const SimulateArtifacts& artifacts, const ScenarioConfig& config,
                              const std::string& out_dir);

/// One solve per value; writes sweep.csv in long format with the analytic
/// diffusion-limit profiles included as reference variables per value.
void run_sweep(const ScenarioConfig& base, const std::string& parameter,
               const std::vector<double>& values, const std::string& out_dir);

/// Validates the shared-parameter and refinement preconditions, then delegates
/// to fragmentation_order_check; writes fragment_gap.csv and fragment_report.json.
FragmentationReport run_fragment(const ScenarioConfig& fine, const ScenarioConfig& coarse,
                                 double T, const std::string& out_dir);

}  // namespace circlegame
