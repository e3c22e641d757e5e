#pragma once

#include <optional>
#include <vector>

#include "circlegame/cyclic.hpp"
#include "circlegame/domain.hpp"

namespace circlegame {

/// Forward drift-diffusion operator L p = sigma p'' + v p' - delta p, cyclic bands.
/// Note the asymmetry with the adjoint: no v' term here.
CyclicTridiagonal assemble_forward(const EnvironmentSpec& env, const CircleGrid& grid);

struct PollutionState {
    double t = 0.0;
    SpatialField p;
};

/// Crank-Nicolson integrator for p_t = L p + n with time-constant forcing:
///   (I - dt/2 L) p_new = (I + dt/2 L) p_old + dt n.
/// Second order in dt, unconditionally stable; one cyclic solve per step.
class CrankNicolsonStepper {
public:
    CrankNicolsonStepper(const EnvironmentSpec& env, const CircleGrid& grid, double dt);

    void advance(PollutionState& state, const SpatialField& n_star) const;
    double dt() const { return dt_; }

private:
    CyclicTridiagonal lhs_;     // I - dt/2 L
    CyclicTridiagonal rhs_op_;  // I + dt/2 L
    double dt_;
};

PollutionState step(const PollutionState& state, const SpatialField& n_star,
                    const EnvironmentSpec& env, const CircleGrid& grid, double dt);

struct Trajectory {
    std::vector<double> times;
    std::vector<SpatialField> states;
    std::vector<double> mass;  // circle integral of p at each sample
    std::vector<double> gap;   // sup distance to the reference, when one is given
};

/// Integrates to time T (rounded to a whole number of steps) storing n_samples+1
/// evenly spaced snapshots including t=0 and the final time.
Trajectory simulate(const SpatialField& p0, const SpatialField& n_star,
                    const EnvironmentSpec& env, const CircleGrid& grid, double T, double dt,
                    int n_samples, const SpatialField* reference = nullptr);

struct SteadyState {
    SpatialField p;
    double residual;  // ||L p + n*||_inf on the discrete system
};

/// Long-run profile solving (-L) p = n*. Requires min(v'/2 + delta) > 0.
SteadyState steady_state(const SpatialField& n_star, const EnvironmentSpec& env,
                         const CircleGrid& grid);

struct ConvergenceReport {
    double final_gap = 0.0;
    std::optional<double> fitted_rate;  // decay rate of the sup gap; absent if the gap never resolves
    double tolerance = 0.0;
    bool pass = false;
};

ConvergenceReport convergence_report(const Trajectory& traj, const SpatialField& p_inf,
                                     double tolerance);

}  // namespace circlegame
