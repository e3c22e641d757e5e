#pragma once

#include <functional>
#include <numbers>
#include <vector>

namespace circlegame {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Uniform periodic grid on [0, 2*pi): nodes x_k = k*dx, node n-1 adjacent to node 0.
struct CircleGrid {
    int n_points = 0;
    double dx = 0.0;

    /// n_points must be even and >= 8.
    static CircleGrid make(int n_points);

    double node(int k) const { return dx * static_cast<double>(k); }

    int wrap(int k) const {
        int m = k % n_points;
        return m < 0 ? m + n_points : m;
    }

    std::vector<double> nodes() const;

    /// Index of the node nearest to x (mod 2*pi).
    int nearest_node(double x) const;
};

CircleGrid build_grid(int n_points);

/// Real-valued field sampled at the grid nodes.
class SpatialField {
public:
    SpatialField() = default;
    explicit SpatialField(std::vector<double> values) : v_(std::move(values)) {}
    SpatialField(int n, double fill) : v_(static_cast<std::size_t>(n), fill) {}

    int size() const { return static_cast<int>(v_.size()); }
    double& operator[](int k) { return v_[static_cast<std::size_t>(k)]; }
    double operator[](int k) const { return v_[static_cast<std::size_t>(k)]; }

    /// Periodic read: k may be any integer.
    double at_wrapped(int k) const;

    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    double min() const;
    double max() const;
    double sup_norm() const;
    bool all_finite() const;

private:
    std::vector<double> v_;
};

/// Half-open arc [a, b) with 0 <= a < b <= 2*pi.
struct Arc {
    double a = 0.0;
    double b = 0.0;

    double length() const { return b - a; }
    bool covers_circle() const;

    /// Ownership membership: a included, b excluded (b == 2*pi wraps to exclude node 0
    /// only when the arc does not cover the whole circle).
    bool contains(double x) const;
};

/// Disjoint arcs M_1..M_N; the complement M_0 is uninhabited.
struct Partition {
    std::vector<Arc> arcs;

    /// Validates bounds, pairwise disjointness and that each arc holds >= 2 nodes.
    static Partition make(std::vector<Arc> arcs, const CircleGrid& grid);

    /// 0-based player index owning x, or -1 for M_0.
    int owner(double x) const;

    double total_length() const;

    std::size_t size() const { return arcs.size(); }
};

/// Sample f(x_k) at every node.
SpatialField sample(const CircleGrid& grid, const std::function<double(double)>& f);

/// Zero-extension of w outside the arc; w is read at the arc's own nodes (half-open membership).
SpatialField extend_hat(const SpatialField& w, const Arc& arc, const CircleGrid& grid);

/// Restriction weights used by the linear solvers and the arc quadrature:
/// 1 strictly inside, 1/2 at nodes lying exactly on a boundary (cyclically,
/// so b == 2*pi matches node 0), 0 outside. An arc covering the whole circle
/// has no boundary and gets weight 1 everywhere.
SpatialField arc_weights(const Arc& arc, const CircleGrid& grid);

struct PiecewisePiece {
    Arc arc;
    std::function<double(double)> f;
};

/// Field equal to each piece on its arc and `fallback` elsewhere. Pieces must be disjoint.
SpatialField piecewise_field(const std::vector<PiecewisePiece>& pieces, double fallback,
                             const CircleGrid& grid);
SpatialField piecewise_const_field(const std::vector<std::pair<Arc, double>>& pieces,
                                   double fallback, const CircleGrid& grid);

/// Periodic trapezoid over the whole circle (== dx * sum for periodic data).
double circle_integral(const SpatialField& f, const CircleGrid& grid);

/// Composite trapezoid over one arc: dx * sum(arc_weights * f).
double arc_integral(const SpatialField& f, const Arc& arc, const CircleGrid& grid);

/// Per-player data. w and A are the player's own fields sampled at every node;
/// only values on the closure of the arc are meaningful.
struct PlayerSpec {
    int index = 1;  // 1-based, used in messages and output headers
    Arc arc;
    double rho = 0.0;
    double gamma = 0.0;
    SpatialField w;
    SpatialField A;
};

struct EnvironmentSpec {
    double sigma = 0.0;
    SpatialField v;
    SpatialField delta;
    double eta = 0.0;
    double theta = 0.5;
};

/// Centered-difference derivative of a sampled periodic field.
SpatialField centered_derivative(const SpatialField& f, const CircleGrid& grid);

/// |min(v'/2 + delta, 0)|_inf: discount rates must exceed this for the resolvent to exist.
double rho_lower_bound(const EnvironmentSpec& env, const CircleGrid& grid);

/// min over nodes of v'/2 + delta; must be > 0 for a steady state to exist.
double min_half_vprime_plus_delta(const EnvironmentSpec& env, const CircleGrid& grid);

}  // namespace circlegame
