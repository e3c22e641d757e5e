#pragma once

#include "circlegame/cyclic.hpp"
#include "circlegame/domain.hpp"

namespace circlegame {

/// Numerical-quality failure: a solution violates a bound it provably satisfies.
class QualityError : public SolverError {
public:
    using SolverError::SolverError;
};

/// Second-order centered discretization of the adjoint drift-diffusion operator
///   L* psi = sigma psi'' - v psi' - (v' + delta) psi
/// as a cyclic banded map. v' is obtained by centered differences of the sampled v.
struct DiscreteAdjointOperator {
    CircleGrid grid;
    CyclicTridiagonal bands;  // bands of L* itself

    SpatialField apply(const SpatialField& psi) const;
};

DiscreteAdjointOperator assemble_adjoint(const EnvironmentSpec& env, const CircleGrid& grid);

struct ResolventSolution {
    SpatialField alpha;
    double residual;  // ||(rho I - L*) alpha - rhs||_inf on the discrete system
};

/// Solves (rho I - L*) alpha = rhs directly. rho must exceed |min(v'/2+delta,0)|_inf.
ResolventSolution solve_resolvent(const DiscreteAdjointOperator& op, double rho,
                                  const SpatialField& rhs);

/// Shadow disutility profile of one player.
struct AlphaProfile {
    int player_index = 0;
    SpatialField values;
    double residual = 0.0;
    double upper_bound = 0.0;  // max w on the arc closure / rho
};

/// Discrete restriction of the player's arc-supported disutility: w times the
/// arc weights (half weight at boundary nodes keeps the restriction second order).
SpatialField alpha_rhs(const PlayerSpec& player, const CircleGrid& grid);

/// Solves the periodic resolvent equation for the player and checks the
/// positivity/upper bounds; violations raise QualityError.
AlphaProfile alpha_profile(const PlayerSpec& player, const EnvironmentSpec& env,
                           const CircleGrid& grid);

/// Truncated Fourier solution for a constant-coefficient circle with support [0, ell),
/// no advection:
///   alpha(x) = ell*w0 / (2*pi*(rho+delta0))
///            + (w0/pi) * sum_n [sin(nx)(1-cos(n ell)) + sin(n ell) cos(nx)] / [n (rho+delta0+sigma n^2)]
SpatialField alpha_series_no_advection(double ell, double w0, double rho, double delta0,
                                       double sigma, int n_terms, const CircleGrid& grid);

/// Same with constant advection v0. Coefficients per mode n, with
/// beta = rho + delta0 + sigma n^2, W1 = <w_hat, sin>/sqrt(pi)... :
///   <alpha, e1_n> = (beta W1 + v0 n W2) / (beta^2 + (v0 n)^2)
///   <alpha, e2_n> = (beta W2 - v0 n W1) / (beta^2 + (v0 n)^2)
/// These are the unique coefficients solving the resolvent ODE mode by mode.
SpatialField alpha_series_advection(double ell, double w0, double rho, double delta0,
                                    double sigma, double v0, int n_terms, const CircleGrid& grid);

/// Pointwise small-diffusion limit w_hat_j(x) / (rho_j + delta(x)); requires v == 0.
SpatialField alpha_limit_zero_sigma(const PlayerSpec& player, const EnvironmentSpec& env,
                                    const CircleGrid& grid);

/// Large-diffusion limit: the constant  integral(w_hat_j) / integral(rho_j + delta); v == 0.
double alpha_limit_infinite_sigma(const PlayerSpec& player, const EnvironmentSpec& env,
                                  const CircleGrid& grid);

}  // namespace circlegame
