#include "circlegame/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "circlegame/dynamics.hpp"

namespace circlegame {

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::nash: return "nash";
        case Regime::cooperative: return "cooperative";
        case Regime::zero_diffusion: return "zero_diffusion";
        case Regime::sigma_limit: return "sigma_limit";
    }
    return "unknown";
}

namespace {

PlayerProfile strategies_from_alpha(const SpatialField& alpha, const PlayerSpec& player,
                                    const EnvironmentSpec& env, const CircleGrid& grid) {
    SpatialField weights = arc_weights(player.arc, grid);
    PlayerProfile p{SpatialField(grid.n_points, 0.0), SpatialField(grid.n_points, 0.0),
                    SpatialField(grid.n_points, 0.0), SpatialField(grid.n_points, 0.0),
                    SpatialField(grid.n_points, 0.0)};
    const double dep = std::pow(env.eta * env.theta, 1.0 / (1.0 - env.theta));
    for (int k = 0; k < grid.n_points; ++k) {
        if (weights[k] <= 0.0) continue;
        const double a = alpha[k];
        const double Am1 = player.A[k] - 1.0;
        if (!(a > 0.0)) {
            throw SolverError("strategies for player " + std::to_string(player.index) +
                              ": alpha <= 0 at node " + std::to_string(k) +
                              " (numerical failure upstream)");
        }
        if (!(Am1 > 0.0)) {
            throw std::invalid_argument("players[" + std::to_string(player.index) +
                                        "].A: productivity must exceed 1 on the territory");
        }
        p.i[k] = std::pow(a, -1.0 / player.gamma) * std::pow(Am1, (1.0 - player.gamma) / player.gamma) +
                 dep * std::pow(Am1, env.theta / (1.0 - env.theta));
        p.b[k] = std::pow(Am1 * env.eta * env.theta, 1.0 / (1.0 - env.theta));
    }
    return p;
}

// Indices of the nodes owned by the arc, in left-to-right order.
std::vector<int> arc_node_indices(const Arc& arc, const CircleGrid& grid) {
    std::vector<int> ks;
    for (int k = 0; k < grid.n_points; ++k) {
        if (arc.contains(grid.node(k))) ks.push_back(k);
    }
    return ks;
}

}  // namespace

PlayerProfile nash_strategies(const SpatialField& alpha, const PlayerSpec& player,
                              const EnvironmentSpec& env, const CircleGrid& grid) {
    return strategies_from_alpha(alpha, player, env, grid);
}

void derived_profiles(PlayerProfile& profile, const PlayerSpec& player, const EnvironmentSpec& env,
                      const CircleGrid& grid) {
    SpatialField weights = arc_weights(player.arc, grid);
    for (int k = 0; k < grid.n_points; ++k) {
        if (weights[k] <= 0.0) continue;
        profile.n[k] = profile.i[k] - env.eta * std::pow(profile.b[k], env.theta);
        profile.y[k] = player.A[k] * profile.i[k];
        profile.c[k] = (player.A[k] - 1.0) * profile.i[k] - profile.b[k];
        if (profile.c[k] < -1e-12) {
            throw AdmissibilityError("player " + std::to_string(player.index) +
                                     ": negative consumption at node " + std::to_string(k) +
                                     " (c = " + std::to_string(profile.c[k]) + ")");
        }
    }
}

EquilibriumProfile assemble_global(Regime regime, const std::vector<PlayerProfile>& profiles,
                                   const Partition& partition, const CircleGrid& grid) {
    EquilibriumProfile g{regime, SpatialField(grid.n_points, 0.0), SpatialField(grid.n_points, 0.0),
                         SpatialField(grid.n_points, 0.0), SpatialField(grid.n_points, 0.0),
                         SpatialField(grid.n_points, 0.0)};
    for (int k = 0; k < grid.n_points; ++k) {
        const int j = partition.owner(grid.node(k));
        if (j < 0) continue;
        const PlayerProfile& p = profiles[static_cast<std::size_t>(j)];
        g.i[k] = p.i[k];
        g.b[k] = p.b[k];
        g.n[k] = p.n[k];
        g.y[k] = p.y[k];
        g.c[k] = p.c[k];
    }
    return g;
}

SpatialField solver_net_emissions(const std::vector<PlayerProfile>& profiles,
                                  const Partition& partition, const CircleGrid& grid) {
    SpatialField out(grid.n_points, 0.0);
    for (std::size_t j = 0; j < partition.arcs.size(); ++j) {
        SpatialField w = arc_weights(partition.arcs[j], grid);
        for (int k = 0; k < grid.n_points; ++k) out[k] += w[k] * profiles[j].n[k];
    }
    return out;
}

WelfareReport welfare(const std::vector<AlphaProfile>& alphas,
                      const std::vector<PlayerProfile>& profiles, const SpatialField& p0,
                      const std::vector<PlayerSpec>& players, const EnvironmentSpec& env,
                      const Partition& partition, const CircleGrid& grid) {
    (void)env;
    WelfareReport report;
    const std::size_t N = players.size();
    for (std::size_t j = 0; j < N; ++j) {
        const PlayerSpec& pj = players[j];
        const SpatialField& aj = alphas[j].values;

        SpatialField utility(grid.n_points, 0.0);
        SpatialField weights = arc_weights(pj.arc, grid);
        for (int k = 0; k < grid.n_points; ++k) {
            if (weights[k] <= 0.0) continue;
            utility[k] = std::pow(profiles[j].c[k], 1.0 - pj.gamma) / (1.0 - pj.gamma);
        }

        double q = arc_integral(utility, pj.arc, grid);
        for (std::size_t m = 0; m < N; ++m) {
            SpatialField weighted(grid.n_points, 0.0);
            for (int k = 0; k < grid.n_points; ++k) weighted[k] = aj[k] * profiles[m].n[k];
            q -= arc_integral(weighted, partition.arcs[m], grid);
        }
        q /= pj.rho;

        SpatialField ap(grid.n_points, 0.0);
        for (int k = 0; k < grid.n_points; ++k) ap[k] = aj[k] * p0[k];
        const double inner = circle_integral(ap, grid);

        report.players.push_back({pj.index, q, inner, -inner + q});
    }
    return report;
}

CooperativeSolution cooperative_equilibrium(const std::vector<PlayerSpec>& players,
                                            const EnvironmentSpec& env, const Partition& partition,
                                            const CircleGrid& grid, const SpatialField& p0) {
    for (const PlayerSpec& p : players) {
        if (p.rho != players.front().rho || p.gamma != players.front().gamma) {
            throw std::invalid_argument(
                "cooperative benchmark: preference parameters must be identical across players "
                "(player " + std::to_string(p.index) + " differs)");
        }
    }
    const double rho = players.front().rho;

    SpatialField rhs(grid.n_points, 0.0);
    for (const PlayerSpec& p : players) {
        SpatialField r = alpha_rhs(p, grid);
        for (int k = 0; k < grid.n_points; ++k) rhs[k] += r[k];
    }
    DiscreteAdjointOperator op = assemble_adjoint(env, grid);
    ResolventSolution sol = solve_resolvent(op, rho, rhs);

    CooperativeSolution out;
    out.alpha_bar = std::move(sol.alpha);
    out.residual = sol.residual;

    for (const PlayerSpec& p : players) {
        PlayerProfile prof = strategies_from_alpha(out.alpha_bar, p, env, grid);
        derived_profiles(prof, p, env, grid);
        out.per_player.push_back(std::move(prof));
    }
    out.profile = assemble_global(Regime::cooperative, out.per_player, partition, grid);

    double q = 0.0;
    for (std::size_t j = 0; j < players.size(); ++j) {
        const PlayerSpec& pj = players[j];
        SpatialField weights = arc_weights(pj.arc, grid);
        SpatialField integrand(grid.n_points, 0.0);
        for (int k = 0; k < grid.n_points; ++k) {
            if (weights[k] <= 0.0) continue;
            integrand[k] = std::pow(out.per_player[j].c[k], 1.0 - pj.gamma) / (1.0 - pj.gamma) -
                           out.alpha_bar[k] * out.per_player[j].n[k];
        }
        q += arc_integral(integrand, pj.arc, grid);
    }
    out.q_bar = q / rho;

    SpatialField ap(grid.n_points, 0.0);
    for (int k = 0; k < grid.n_points; ++k) ap[k] = out.alpha_bar[k] * p0[k];
    out.alpha_inner = circle_integral(ap, grid);
    out.v_bar = -out.alpha_inner + out.q_bar;
    return out;
}

PlayerProfile zero_diffusion_benchmark(const PlayerSpec& player, const EnvironmentSpec& env,
                                       const CircleGrid& grid) {
    SpatialField alpha0(grid.n_points, 0.0);
    for (int k = 0; k < grid.n_points; ++k) {
        alpha0[k] = player.w[k] / (player.rho + env.delta[k]);
    }
    PlayerProfile p = strategies_from_alpha(alpha0, player, env, grid);
    derived_profiles(p, player, env, grid);
    return p;
}

PlayerProfile infinite_diffusion_benchmark(const PlayerSpec& player, const EnvironmentSpec& env,
                                           const CircleGrid& grid) {
    const double a_inf = alpha_limit_infinite_sigma(player, env, grid);
    SpatialField alpha(grid.n_points, a_inf);
    PlayerProfile p = strategies_from_alpha(alpha, player, env, grid);
    derived_profiles(p, player, env, grid);
    return p;
}

BorderEffectResult border_effect_check(const SpatialField& field, const Arc& arc,
                                       const CircleGrid& grid) {
    BorderEffectResult r;
    std::vector<int> ks = arc_node_indices(arc, grid);
    if (ks.size() < 3) return r;
    std::size_t argmin = 0;
    for (std::size_t p = 1; p < ks.size(); ++p) {
        if (field[ks[p]] < field[ks[argmin]]) argmin = p;
    }
    r.argmin_node = ks[argmin];
    r.midpoint_node = grid.nearest_node(0.5 * (arc.a + arc.b));
    // Accept the node at the midpoint or its immediate neighbor (midpoint may
    // fall between two nodes).
    const bool at_mid = std::abs(grid.node(r.argmin_node) - 0.5 * (arc.a + arc.b)) <=
                        0.5 * grid.dx + 1e-12;
    r.monotone_left = true;
    for (std::size_t p = 0; p < argmin; ++p) {
        if (!(field[ks[p + 1]] < field[ks[p]])) {
            r.monotone_left = false;
            break;
        }
    }
    r.monotone_right = true;
    for (std::size_t p = argmin; p + 1 < ks.size(); ++p) {
        if (!(field[ks[p + 1]] > field[ks[p]])) {
            r.monotone_right = false;
            break;
        }
    }
    r.pass = at_mid && r.monotone_left && r.monotone_right;
    return r;
}

double asymmetry_index(const SpatialField& field, const Arc& arc, const CircleGrid& grid) {
    const int ka = grid.nearest_node(arc.a);
    const int kb_raw = static_cast<int>(std::lround(arc.b / grid.dx));  // may equal n_points
    double worst = 0.0;
    for (int k = ka + 1; k < kb_raw; ++k) {
        const int m = grid.wrap(ka + kb_raw - k);
        worst = std::max(worst, std::abs(field[grid.wrap(k)] - field[m]));
    }
    return worst;
}

double border_skew(const SpatialField& field, const Arc& arc, const CircleGrid& grid) {
    const int ka = grid.nearest_node(arc.a);
    const int kb_raw = static_cast<int>(std::lround(arc.b / grid.dx));
    return field[grid.wrap(kb_raw - 1)] - field[grid.wrap(ka + 1)];
}

bool is_refinement(const Partition& fine, const Partition& coarse) {
    for (const Arc& f : fine.arcs) {
        bool covered = false;
        for (const Arc& c : coarse.arcs) {
            if (c.a <= f.a + 1e-12 && f.b <= c.b + 1e-12) {
                covered = true;
                break;
            }
        }
        if (!covered) return false;
    }
    return true;
}

namespace {

void require_homogeneous(const EnvironmentSpec& env) {
    if (env.delta.max() - env.delta.min() > 1e-12 || env.v.max() - env.v.min() > 1e-12) {
        throw std::invalid_argument(
            "fragmentation comparison requires space-homogeneous coefficients (delta and v constant)");
    }
}

struct ConfigRun {
    SpatialField n_solver;
    SpatialField p_inf;
    Trajectory traj;
};

ConfigRun run_config(const Partition& partition, const SharedParams& shared,
                     const EnvironmentSpec& env, const CircleGrid& grid, const SpatialField& p0,
                     double T, double dt, int n_samples) {
    std::vector<PlayerProfile> profiles;
    for (std::size_t j = 0; j < partition.arcs.size(); ++j) {
        PlayerSpec p;
        p.index = static_cast<int>(j) + 1;
        p.arc = partition.arcs[j];
        p.rho = shared.rho;
        p.gamma = shared.gamma;
        p.w = SpatialField(grid.n_points, shared.w);
        p.A = SpatialField(grid.n_points, shared.A);
        AlphaProfile alpha = alpha_profile(p, env, grid);
        PlayerProfile prof = nash_strategies(alpha.values, p, env, grid);
        derived_profiles(prof, p, env, grid);
        profiles.push_back(std::move(prof));
    }
    ConfigRun run;
    run.n_solver = solver_net_emissions(profiles, partition, grid);
    run.p_inf = steady_state(run.n_solver, env, grid).p;
    run.traj = simulate(p0, run.n_solver, env, grid, T, dt, n_samples, &run.p_inf);
    return run;
}

}  // namespace

FragmentationReport fragmentation_order_check(const Partition& fine, const Partition& coarse,
                                              const SharedParams& shared,
                                              const EnvironmentSpec& env, const CircleGrid& grid,
                                              const SpatialField& p0, double T, double dt,
                                              int n_samples, double slack) {
    if (!is_refinement(fine, coarse)) {
        throw std::invalid_argument(
            "fragmentation comparison: first configuration is not a refinement of the second");
    }
    require_homogeneous(env);

    ConfigRun f = run_config(fine, shared, env, grid, p0, T, dt, n_samples);
    ConfigRun c = run_config(coarse, shared, env, grid, p0, T, dt, n_samples);

    FragmentationReport rep;
    rep.slack = slack;
    rep.times = f.traj.times;
    rep.min_gap_trajectory = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < f.traj.states.size(); ++s) {
        double m = std::numeric_limits<double>::infinity();
        for (int k = 0; k < grid.n_points; ++k) {
            m = std::min(m, f.traj.states[s][k] - c.traj.states[s][k]);
        }
        rep.min_gap_at_time.push_back(m);
        rep.min_gap_trajectory = std::min(rep.min_gap_trajectory, m);
    }
    rep.min_gap_steady = std::numeric_limits<double>::infinity();
    for (int k = 0; k < grid.n_points; ++k) {
        rep.min_gap_steady = std::min(rep.min_gap_steady, f.p_inf[k] - c.p_inf[k]);
    }
    rep.pass = rep.min_gap_trajectory >= -slack && rep.min_gap_steady >= -slack;
    return rep;
}

}  // namespace circlegame
