#include "circlegame/elliptic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace circlegame {

SpatialField DiscreteAdjointOperator::apply(const SpatialField& psi) const {
    return SpatialField(bands.apply(psi.values()));
}

DiscreteAdjointOperator assemble_adjoint(const EnvironmentSpec& env, const CircleGrid& grid) {
    const int n = grid.n_points;
    if (env.v.size() != n || env.delta.size() != n) {
        throw std::invalid_argument("assemble_adjoint: v/delta length does not match grid");
    }
    const double h2 = grid.dx * grid.dx;
    SpatialField vp = centered_derivative(env.v, grid);
    CyclicTridiagonal m = CyclicTridiagonal::zeros(n);
    for (int k = 0; k < n; ++k) {
        const std::size_t i = static_cast<std::size_t>(k);
        m.lower[i] = env.sigma / h2 + env.v[k] / (2.0 * grid.dx);
        m.diag[i] = -2.0 * env.sigma / h2 - (vp[k] + env.delta[k]);
        m.upper[i] = env.sigma / h2 - env.v[k] / (2.0 * grid.dx);
    }
    return {grid, std::move(m)};
}

ResolventSolution solve_resolvent(const DiscreteAdjointOperator& op, double rho,
                                  const SpatialField& rhs) {
    if (rhs.size() != op.grid.n_points) {
        throw std::invalid_argument("solve_resolvent: rhs length does not match grid");
    }
    CyclicTridiagonal system = op.bands.shifted(rho, -1.0);  // rho*I - L*
    CyclicSolve s = solve_cyclic(system, rhs.values());
    return {SpatialField(std::move(s.x)), s.residual};
}

SpatialField alpha_rhs(const PlayerSpec& player, const CircleGrid& grid) {
    SpatialField weights = arc_weights(player.arc, grid);
    SpatialField out(grid.n_points, 0.0);
    for (int k = 0; k < grid.n_points; ++k) out[k] = weights[k] * player.w[k];
    return out;
}

AlphaProfile alpha_profile(const PlayerSpec& player, const EnvironmentSpec& env,
                           const CircleGrid& grid) {
    DiscreteAdjointOperator op = assemble_adjoint(env, grid);
    const double bound = rho_lower_bound(env, grid);
    if (!(player.rho > bound)) {
        throw std::invalid_argument("players[" + std::to_string(player.index) +
                                    "].rho: discount rate must exceed |min(v'/2 + delta, 0)| = " +
                                    std::to_string(bound));
    }
    SpatialField rhs = alpha_rhs(player, grid);
    ResolventSolution sol = solve_resolvent(op, player.rho, rhs);

    double w_max = 0.0;
    SpatialField weights = arc_weights(player.arc, grid);
    for (int k = 0; k < grid.n_points; ++k) {
        if (weights[k] > 0.0) w_max = std::max(w_max, player.w[k]);
    }
    const double upper = w_max / player.rho;
    const double tol = 1e-8 * std::max(1.0, upper);
    if (!(sol.alpha.min() > 0.0)) {
        throw QualityError("alpha for player " + std::to_string(player.index) +
                           " is not strictly positive (min = " + std::to_string(sol.alpha.min()) +
                           "); numerical failure upstream");
    }
    if (sol.alpha.max() > upper + tol) {
        throw QualityError("alpha for player " + std::to_string(player.index) +
                           " exceeds max(w)/rho = " + std::to_string(upper));
    }
    AlphaProfile p;
    p.player_index = player.index;
    p.values = std::move(sol.alpha);
    p.residual = sol.residual;
    p.upper_bound = upper;
    return p;
}

SpatialField alpha_series_no_advection(double ell, double w0, double rho, double delta0,
                                       double sigma, int n_terms, const CircleGrid& grid) {
    SpatialField out(grid.n_points, ell * w0 / (two_pi * (rho + delta0)));
    for (int k = 0; k < grid.n_points; ++k) {
        const double x = grid.node(k);
        double acc = 0.0;
        for (int n = 1; n <= n_terms; ++n) {
            const double nd = static_cast<double>(n);
            acc += (std::sin(nd * x) * (1.0 - std::cos(nd * ell)) +
                    std::sin(nd * ell) * std::cos(nd * x)) /
                   (nd * (rho + delta0 + sigma * nd * nd));
        }
        out[k] += (w0 / std::numbers::pi) * acc;
    }
    return out;
}

SpatialField alpha_series_advection(double ell, double w0, double rho, double delta0,
                                    double sigma, double v0, int n_terms, const CircleGrid& grid) {
    const double spi = std::sqrt(std::numbers::pi);
    SpatialField out(grid.n_points, ell * w0 / (two_pi * (rho + delta0)));
    for (int n = 1; n <= n_terms; ++n) {
        const double nd = static_cast<double>(n);
        const double beta = rho + delta0 + sigma * nd * nd;
        const double w1 = (w0 / spi) * (1.0 - std::cos(nd * ell)) / nd;
        const double w2 = (w0 / spi) * std::sin(nd * ell) / nd;
        const double den = beta * beta + (v0 * nd) * (v0 * nd);
        const double c1 = (beta * w1 + v0 * nd * w2) / den;
        const double c2 = (beta * w2 - v0 * nd * w1) / den;
        for (int k = 0; k < grid.n_points; ++k) {
            const double x = grid.node(k);
            out[k] += (c1 * std::sin(nd * x) + c2 * std::cos(nd * x)) / spi;
        }
    }
    return out;
}

SpatialField alpha_limit_zero_sigma(const PlayerSpec& player, const EnvironmentSpec& env,
                                    const CircleGrid& grid) {
    if (env.v.sup_norm() != 0.0) {
        throw std::invalid_argument("alpha_limit_zero_sigma: stated for v == 0 only");
    }
    SpatialField what = extend_hat(player.w, player.arc, grid);
    SpatialField out(grid.n_points, 0.0);
    for (int k = 0; k < grid.n_points; ++k) {
        out[k] = what[k] / (player.rho + env.delta[k]);
    }
    return out;
}

double alpha_limit_infinite_sigma(const PlayerSpec& player, const EnvironmentSpec& env,
                                  const CircleGrid& grid) {
    if (env.v.sup_norm() != 0.0) {
        throw std::invalid_argument("alpha_limit_infinite_sigma: stated for v == 0 only");
    }
    SpatialField what = extend_hat(player.w, player.arc, grid);
    double denom = 0.0;
    for (int k = 0; k < grid.n_points; ++k) denom += player.rho + env.delta[k];
    return circle_integral(what, grid) / (denom * grid.dx);
}

}  // namespace circlegame
