#pragma once

#include <optional>
#include <string>
#include <vector>

#include "circlegame/domain.hpp"
#include "circlegame/elliptic.hpp"

namespace circlegame {

class AdmissibilityError : public SolverError {
public:
    using SolverError::SolverError;
};

enum class Regime { nash, cooperative, zero_diffusion, sigma_limit };

std::string regime_name(Regime r);

/// One player's closed-form fields, evaluated from the player's own data at every
/// node (only values on the arc closure are meaningful).
struct PlayerProfile {
    SpatialField i, b, n, y, c;
};

/// Strategy pair (i, b) from a shadow-disutility profile:
///   i(x) = alpha(x)^(-1/gamma) (A-1)^((1-gamma)/gamma) + (eta theta)^(1/(1-theta)) (A-1)^(theta/(1-theta))
///   b(x) = [(A-1) eta theta]^(1/(1-theta))
/// Requires alpha > 0 and A > 1 on the arc closure.
PlayerProfile nash_strategies(const SpatialField& alpha, const PlayerSpec& player,
                              const EnvironmentSpec& env, const CircleGrid& grid);

/// Fills n = i - eta b^theta, y = A i, c = (A-1) i - b and asserts c >= 0 on the arc.
void derived_profiles(PlayerProfile& profile, const PlayerSpec& player,
                      const EnvironmentSpec& env, const CircleGrid& grid);

/// Global per-node fields assembled by arc ownership; zero on the uninhabited set.
struct EquilibriumProfile {
    Regime regime = Regime::nash;
    SpatialField i, b, n, y, c;
};

EquilibriumProfile assemble_global(Regime regime, const std::vector<PlayerProfile>& profiles,
                                   const Partition& partition, const CircleGrid& grid);

/// Net-emission field fed to the linear solvers: sum over players of
/// arc_weights_j * n_j, i.e. jump-averaged at territory borders.
SpatialField solver_net_emissions(const std::vector<PlayerProfile>& profiles,
                                  const Partition& partition, const CircleGrid& grid);

struct WelfareReport {
    struct Entry {
        int player_index = 0;
        double q = 0.0;            // constant term of the value
        double alpha_inner = 0.0;  // integral of alpha_j * p0
        double v = 0.0;            // -alpha_inner + q
    };
    std::vector<Entry> players;
};

WelfareReport welfare(const std::vector<AlphaProfile>& alphas,
                      const std::vector<PlayerProfile>& profiles, const SpatialField& p0,
                      const std::vector<PlayerSpec>& players, const EnvironmentSpec& env,
                      const Partition& partition, const CircleGrid& grid);

struct CooperativeSolution {
    SpatialField alpha_bar;
    double residual = 0.0;
    std::vector<PlayerProfile> per_player;  // strategies from alpha_bar and each player's A
    EquilibriumProfile profile;
    double q_bar = 0.0;
    double alpha_inner = 0.0;  // integral of alpha_bar * p0
    double v_bar = 0.0;
};

/// Single-planner benchmark; requires all rho_j equal and all gamma_j equal.
/// Solves one resolvent with rhs = sum of the players' restricted disutilities
/// (the full adjoint operator is used, so a nonzero advection field is accepted).
CooperativeSolution cooperative_equilibrium(const std::vector<PlayerSpec>& players,
                                            const EnvironmentSpec& env, const Partition& partition,
                                            const CircleGrid& grid, const SpatialField& p0);

/// Pointwise sigma=0 benchmark: alpha replaced by w_j(x)/(rho_j + delta(x)).
PlayerProfile zero_diffusion_benchmark(const PlayerSpec& player, const EnvironmentSpec& env,
                                       const CircleGrid& grid);

/// sigma -> infinity benchmark: alpha replaced by the constant
/// integral(w_hat_j)/integral(rho_j + delta).
PlayerProfile infinite_diffusion_benchmark(const PlayerSpec& player, const EnvironmentSpec& env,
                                           const CircleGrid& grid);

// ---- qualitative shape checks used by the scenario runner and the test suites ----

struct BorderEffectResult {
    bool pass = false;
    int argmin_node = -1;
    int midpoint_node = -1;
    bool monotone_left = false;
    bool monotone_right = false;
};

/// Within one arc: minimum at the arc midpoint, monotone toward both borders.
BorderEffectResult border_effect_check(const SpatialField& field, const Arc& arc,
                                       const CircleGrid& grid);

/// max over interior arc nodes of |f(x) - f(mirror(x))|, mirror about the arc midpoint.
double asymmetry_index(const SpatialField& field, const Arc& arc, const CircleGrid& grid);

/// f near the right border minus f near the left border (one node inside each).
double border_skew(const SpatialField& field, const Arc& arc, const CircleGrid& grid);

// ---- fragmentation ordering ----

/// Space-homogeneous data shared by both configurations of a fragmentation comparison.
struct SharedParams {
    double rho = 0.0;
    double gamma = 0.0;
    double w = 0.0;
    double A = 0.0;
};

/// True when every arc of `fine` is contained in some arc of `coarse`.
bool is_refinement(const Partition& fine, const Partition& coarse);

struct FragmentationReport {
    std::vector<double> times;
    std::vector<double> min_gap_at_time;  // min over nodes of p_fine - p_coarse
    double min_gap_trajectory = 0.0;
    double min_gap_steady = 0.0;
    double slack = 0.0;
    bool pass = false;
};

/// Runs both equilibria and pollution paths from the same p0 and reports the
/// pointwise ordering margin over the stored samples and at the steady state.
FragmentationReport fragmentation_order_check(const Partition& fine, const Partition& coarse,
                                              const SharedParams& shared,
                                              const EnvironmentSpec& env, const CircleGrid& grid,
                                              const SpatialField& p0, double T, double dt,
                                              int n_samples, double slack = 1e-10);

}  // namespace circlegame
