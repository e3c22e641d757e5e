#include "circlegame/cyclic.hpp"

#include <cmath>
#include <string>

namespace circlegame {

std::vector<double> CyclicTridiagonal::apply(const std::vector<double>& x) const {
    const int n = size();
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const int km = (k == 0) ? n - 1 : k - 1;
        const int kp = (k == n - 1) ? 0 : k + 1;
        y[static_cast<std::size_t>(k)] = lower[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(km)] +
                                         diag[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)] +
                                         upper[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(kp)];
    }
    return y;
}

CyclicTridiagonal CyclicTridiagonal::shifted(double a, double s) const {
    CyclicTridiagonal m = *this;
    for (std::size_t k = 0; k < diag.size(); ++k) {
        m.lower[k] *= s;
        m.upper[k] *= s;
        m.diag[k] = a + s * m.diag[k];
    }
    return m;
}

namespace {

// Thomas elimination for the (non-cyclic) tridiagonal system with the given bands.
// b is overwritten; returns the solution.
std::vector<double> thomas(std::vector<double> dl, std::vector<double> dd, std::vector<double> du,
                           std::vector<double> b) {
    const std::size_t n = dd.size();
    for (std::size_t k = 1; k < n; ++k) {
        if (dd[k - 1] == 0.0) {
            throw SolverError("cyclic solve: zero pivot at row " + std::to_string(k - 1) +
                              " (system singular or not diagonally dominant)");
        }
        const double m = dl[k] / dd[k - 1];
        dd[k] -= m * du[k - 1];
        b[k] -= m * b[k - 1];
    }
    if (dd[n - 1] == 0.0) {
        throw SolverError("cyclic solve: zero pivot at last row (system singular)");
    }
    std::vector<double> x(n);
    x[n - 1] = b[n - 1] / dd[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) {
        x[k] = (b[k] - du[k] * x[k + 1]) / dd[k];
    }
    return x;
}

// One Sherman-Morrison solve: A = B + u v^T where B is tridiagonal with
// modified corner diagonals and u = (g,0,...,0,lower[0])^T, v = (1,0,...,0,upper[n-1]/g)^T.
std::vector<double> cyclic_direct(const CyclicTridiagonal& A, const std::vector<double>& rhs) {
    const std::size_t n = A.diag.size();
    const double corner_lower = A.lower[0];       // row 0, column n-1
    const double corner_upper = A.upper[n - 1];   // row n-1, column 0
    const double g = -A.diag[0];
    if (g == 0.0) {
        throw SolverError("cyclic solve: zero leading diagonal entry");
    }
    std::vector<double> dd = A.diag;
    dd[0] -= g;
    dd[n - 1] -= corner_lower * corner_upper / g;

    std::vector<double> u(n, 0.0);
    u[0] = g;
    u[n - 1] = corner_upper;

    std::vector<double> y = thomas(A.lower, dd, A.upper, rhs);
    std::vector<double> z = thomas(A.lower, dd, A.upper, u);

    const double vy = y[0] + corner_lower / g * y[n - 1];
    const double vz = z[0] + corner_lower / g * z[n - 1];
    const double denom = 1.0 + vz;
    // A singular cyclic system surfaces here as 1 + v^T z collapsing to rounding noise.
    if (!std::isfinite(denom) || std::abs(denom) <= 1e-12 * (1.0 + std::abs(vz))) {
        throw SolverError(
            "cyclic solve: system is singular or near-singular (condition diagnostic: periodic "
            "correction 1 + v^T z = " +
            std::to_string(denom) + ")");
    }
    const double f = vy / denom;
    for (std::size_t k = 0; k < n; ++k) y[k] -= f * z[k];
    return y;
}

}  // namespace

CyclicSolve solve_cyclic(const CyclicTridiagonal& A, const std::vector<double>& rhs) {
    const int n = A.size();
    if (n < 3) throw SolverError("cyclic solve: need at least 3 unknowns");
    if (static_cast<int>(rhs.size()) != n) throw SolverError("cyclic solve: rhs length mismatch");

    std::vector<double> x = cyclic_direct(A, rhs);

    // One refinement pass keeps the residual at round-off level.
    std::vector<double> Ax = A.apply(x);
    std::vector<double> r(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        r[static_cast<std::size_t>(k)] =
            rhs[static_cast<std::size_t>(k)] - Ax[static_cast<std::size_t>(k)];
    }
    std::vector<double> dx = cyclic_direct(A, r);
    for (int k = 0; k < n; ++k) x[static_cast<std::size_t>(k)] += dx[static_cast<std::size_t>(k)];

    Ax = A.apply(x);
    double res = 0.0;
    double rhs_norm = 0.0;
    for (int k = 0; k < n; ++k) {
        res = std::max(res, std::abs(Ax[static_cast<std::size_t>(k)] - rhs[static_cast<std::size_t>(k)]));
        rhs_norm = std::max(rhs_norm, std::abs(rhs[static_cast<std::size_t>(k)]));
    }
    for (double xv : x) {
        if (!std::isfinite(xv)) {
            throw SolverError("cyclic solve: non-finite solution (ill-conditioned system)");
        }
    }
    if (rhs_norm > 0.0 && res > 1e-6 * rhs_norm) {
        throw SolverError("cyclic solve: residual " + std::to_string(res) +
                          " did not converge (ill-conditioned system)");
    }
    return {std::move(x), res};
}

}  // namespace circlegame
