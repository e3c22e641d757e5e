#include "circlegame/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace circlegame {

CyclicTridiagonal assemble_forward(const EnvironmentSpec& env, const CircleGrid& grid) {
    const int n = grid.n_points;
    if (env.v.size() != n || env.delta.size() != n) {
        throw std::invalid_argument("assemble_forward: v/delta length does not match grid");
    }
    const double h2 = grid.dx * grid.dx;
    CyclicTridiagonal m = CyclicTridiagonal::zeros(n);
    for (int k = 0; k < n; ++k) {
        const std::size_t i = static_cast<std::size_t>(k);
        m.lower[i] = env.sigma / h2 - env.v[k] / (2.0 * grid.dx);
        m.diag[i] = -2.0 * env.sigma / h2 - env.delta[k];
        m.upper[i] = env.sigma / h2 + env.v[k] / (2.0 * grid.dx);
    }
    return m;
}

CrankNicolsonStepper::CrankNicolsonStepper(const EnvironmentSpec& env, const CircleGrid& grid,
                                           double dt)
    : dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    CyclicTridiagonal L = assemble_forward(env, grid);
    lhs_ = L.shifted(1.0, -0.5 * dt);
    rhs_op_ = L.shifted(1.0, 0.5 * dt);
}

void CrankNicolsonStepper::advance(PollutionState& state, const SpatialField& n_star) const {
    std::vector<double> rhs = rhs_op_.apply(state.p.values());
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] += dt_ * n_star[static_cast<int>(k)];
    CyclicSolve s = solve_cyclic(lhs_, rhs);
    state.p = SpatialField(std::move(s.x));
    state.t += dt_;
}

PollutionState step(const PollutionState& state, const SpatialField& n_star,
                    const EnvironmentSpec& env, const CircleGrid& grid, double dt) {
    CrankNicolsonStepper stepper(env, grid, dt);
    PollutionState next = state;
    stepper.advance(next, n_star);
    return next;
}

Trajectory simulate(const SpatialField& p0, const SpatialField& n_star,
                    const EnvironmentSpec& env, const CircleGrid& grid, double T, double dt,
                    int n_samples, const SpatialField* reference) {
    if (!(T > 0.0)) throw std::invalid_argument("simulation horizon must be positive");
    if (n_samples < 1) throw std::invalid_argument("need at least one sample");
    const long n_steps = std::lround(T / dt);
    if (n_steps < 1) throw std::invalid_argument("horizon shorter than one time step");

    CrankNicolsonStepper stepper(env, grid, dt);
    PollutionState state{0.0, p0};

    Trajectory traj;
    auto record = [&](const PollutionState& s) {
        traj.times.push_back(s.t);
        traj.states.push_back(s.p);
        traj.mass.push_back(circle_integral(s.p, grid));
        if (reference != nullptr) {
            double g = 0.0;
            for (int k = 0; k < grid.n_points; ++k) {
                g = std::max(g, std::abs(s.p[k] - (*reference)[k]));
            }
            traj.gap.push_back(g);
        }
    };

    record(state);
    std::vector<long> due;
    for (int j = 1; j <= n_samples; ++j) {
        long d = std::lround(static_cast<double>(j) * static_cast<double>(n_steps) /
                             static_cast<double>(n_samples));
        if (d >= 1 && (due.empty() || d != due.back())) due.push_back(d);
    }
    std::size_t next = 0;
    for (long s = 1; s <= n_steps; ++s) {
        stepper.advance(state, n_star);
        if (next < due.size() && s == due[next]) {
            record(state);
            ++next;
        }
    }
    return traj;
}

SteadyState steady_state(const SpatialField& n_star, const EnvironmentSpec& env,
                         const CircleGrid& grid) {
    const double dbar = min_half_vprime_plus_delta(env, grid);
    if (!(dbar > 0.0)) {
        throw std::invalid_argument(
            "steady state requires min(v'/2 + delta) > 0 over the circle; got " +
            std::to_string(dbar) + " (no long-run profile exists otherwise)");
    }
    CyclicTridiagonal negL = assemble_forward(env, grid).shifted(0.0, -1.0);
    CyclicSolve s = solve_cyclic(negL, n_star.values());
    return {SpatialField(std::move(s.x)), s.residual};
}

ConvergenceReport convergence_report(const Trajectory& traj, const SpatialField& p_inf,
                                     double tolerance) {
    ConvergenceReport rep;
    rep.tolerance = tolerance;
    const double scale = std::max(1.0, p_inf.sup_norm());

    double final_gap = 0.0;
    const SpatialField& last = traj.states.back();
    for (int k = 0; k < last.size(); ++k) {
        final_gap = std::max(final_gap, std::abs(last[k] - p_inf[k]));
    }
    rep.final_gap = final_gap;
    rep.pass = final_gap <= tolerance;

    // Least-squares slope of log(gap) over the samples where the gap is resolved.
    std::vector<double> ts, ys;
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        double g = 0.0;
        for (int k = 0; k < p_inf.size(); ++k) {
            g = std::max(g, std::abs(traj.states[s][k] - p_inf[k]));
        }
        if (g > 1e-12 * scale) {
            ts.push_back(traj.times[s]);
            ys.push_back(std::log(g));
        }
    }
    if (ts.size() >= 3) {
        double st = 0, sy = 0, stt = 0, sty = 0;
        const double m = static_cast<double>(ts.size());
        for (std::size_t s = 0; s < ts.size(); ++s) {
            st += ts[s];
            sy += ys[s];
            stt += ts[s] * ts[s];
            sty += ts[s] * ys[s];
        }
        const double denom = m * stt - st * st;
        if (denom > 0.0) {
            rep.fitted_rate = -(m * sty - st * sy) / denom;
        }
    }
    return rep;
}

}  // namespace circlegame
