#pragma once

#include <stdexcept>
#include <vector>

namespace circlegame {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cyclic tridiagonal matrix: row k reads
///   lower[k]*x[k-1] + diag[k]*x[k] + upper[k]*x[k+1]
/// with periodic indices (row 0 touches x[n-1], row n-1 touches x[0]).
struct CyclicTridiagonal {
    std::vector<double> lower, diag, upper;

    int size() const { return static_cast<int>(diag.size()); }

    static CyclicTridiagonal zeros(int n) {
        CyclicTridiagonal m;
        m.lower.assign(static_cast<std::size_t>(n), 0.0);
        m.diag.assign(static_cast<std::size_t>(n), 0.0);
        m.upper.assign(static_cast<std::size_t>(n), 0.0);
        return m;
    }

    std::vector<double> apply(const std::vector<double>& x) const;

    /// a*I + s*M, elementwise on the bands.
    CyclicTridiagonal shifted(double a, double s) const;
};

struct CyclicSolve {
    std::vector<double> x;
    double residual;  // ||A x - rhs||_inf after one refinement pass
};

/// Direct solve via tridiagonal elimination with a rank-1 periodic correction,
/// followed by one iterative refinement pass. Throws SolverError with a pivot
/// diagnostic if the factorization breaks down.
CyclicSolve solve_cyclic(const CyclicTridiagonal& A, const std::vector<double>& rhs);

}  // namespace circlegame
