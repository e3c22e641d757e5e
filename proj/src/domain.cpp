#include "circlegame/domain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace circlegame {

namespace {
// Matching tolerance for "node lies exactly on an arc boundary". Node/boundary
// coordinates built from the same pi constant agree to a few ulps; anything
// below one grid spacing is safe.
constexpr double kBoundaryTol = 1e-12;

bool same_angle(double x, double y) {
    double d = std::fmod(std::abs(x - y), two_pi);
    return d < kBoundaryTol || two_pi - d < kBoundaryTol;
}
}  // namespace

CircleGrid CircleGrid::make(int n_points) {
    if (n_points < 8) {
        throw std::invalid_argument("grid.n_points: must be at least 8, got " +
                                    std::to_string(n_points));
    }
    if (n_points % 2 != 0) {
        throw std::invalid_argument("grid.n_points: must be even, got " +
                                    std::to_string(n_points));
    }
    CircleGrid g;
    g.n_points = n_points;
    g.dx = two_pi / static_cast<double>(n_points);
    return g;
}

CircleGrid build_grid(int n_points) { return CircleGrid::make(n_points); }

std::vector<double> CircleGrid::nodes() const {
    std::vector<double> xs(static_cast<std::size_t>(n_points));
    for (int k = 0; k < n_points; ++k) xs[static_cast<std::size_t>(k)] = node(k);
    return xs;
}

int CircleGrid::nearest_node(double x) const {
    double r = std::fmod(x, two_pi);
    if (r < 0) r += two_pi;
    return wrap(static_cast<int>(std::lround(r / dx)));
}

double SpatialField::at_wrapped(int k) const {
    int n = size();
    int m = k % n;
    if (m < 0) m += n;
    return v_[static_cast<std::size_t>(m)];
}

double SpatialField::min() const { return *std::min_element(v_.begin(), v_.end()); }
double SpatialField::max() const { return *std::max_element(v_.begin(), v_.end()); }

double SpatialField::sup_norm() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

bool SpatialField::all_finite() const {
    return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

bool Arc::covers_circle() const { return length() >= two_pi - kBoundaryTol; }

bool Arc::contains(double x) const {
    if (covers_circle()) return true;
    return a <= x && x < b;
}

Partition Partition::make(std::vector<Arc> arcs, const CircleGrid& grid) {
    if (arcs.empty()) throw std::invalid_argument("players: at least one territory required");
    for (std::size_t j = 0; j < arcs.size(); ++j) {
        const Arc& m = arcs[j];
        if (!(m.a >= 0.0 && m.a < m.b && m.b <= two_pi + kBoundaryTol)) {
            throw std::invalid_argument("players[" + std::to_string(j + 1) +
                                        "].arc: need 0 <= a < b <= 2*pi");
        }
        int count = 0;
        for (int k = 0; k < grid.n_points; ++k) count += m.contains(grid.node(k)) ? 1 : 0;
        if (count < 2) {
            throw std::invalid_argument("players[" + std::to_string(j + 1) +
                                        "].arc: holds fewer than 2 grid nodes at this resolution");
        }
    }
    for (std::size_t j = 0; j + 1 < arcs.size(); ++j) {
        for (std::size_t h = j + 1; h < arcs.size(); ++h) {
            const Arc& u = arcs[j];
            const Arc& w = arcs[h];
            bool disjoint = (u.b <= w.a + kBoundaryTol) || (w.b <= u.a + kBoundaryTol);
            if (!disjoint) {
                throw std::invalid_argument("players[" + std::to_string(j + 1) + "].arc and players[" +
                                            std::to_string(h + 1) + "].arc overlap");
            }
        }
    }
    double total = 0.0;
    for (const Arc& m : arcs) total += m.length();
    if (total > two_pi + 1e-9) {
        throw std::invalid_argument("players: arc lengths sum to more than 2*pi");
    }
    Partition p;
    p.arcs = std::move(arcs);
    return p;
}

int Partition::owner(double x) const {
    for (std::size_t j = 0; j < arcs.size(); ++j) {
        if (arcs[j].contains(x)) return static_cast<int>(j);
    }
    return -1;
}

double Partition::total_length() const {
    double t = 0.0;
    for (const Arc& m : arcs) t += m.length();
    return t;
}

SpatialField sample(const CircleGrid& grid, const std::function<double(double)>& f) {
    SpatialField out(grid.n_points, 0.0);
    for (int k = 0; k < grid.n_points; ++k) out[k] = f(grid.node(k));
    return out;
}

SpatialField extend_hat(const SpatialField& w, const Arc& arc, const CircleGrid& grid) {
    if (w.size() != grid.n_points) {
        throw std::invalid_argument("extend_hat: field length does not match grid");
    }
    SpatialField out(grid.n_points, 0.0);
    for (int k = 0; k < grid.n_points; ++k) {
        if (arc.contains(grid.node(k))) out[k] = w[k];
    }
    return out;
}

SpatialField arc_weights(const Arc& arc, const CircleGrid& grid) {
    SpatialField out(grid.n_points, 0.0);
    if (arc.covers_circle()) {
        for (int k = 0; k < grid.n_points; ++k) out[k] = 1.0;
        return out;
    }
    for (int k = 0; k < grid.n_points; ++k) {
        double x = grid.node(k);
        if (same_angle(x, arc.a) || same_angle(x, arc.b)) {
            out[k] = 0.5;
        } else if (arc.a < x && x < arc.b) {
            out[k] = 1.0;
        }
    }
    return out;
}

SpatialField piecewise_field(const std::vector<PiecewisePiece>& pieces, double fallback,
                             const CircleGrid& grid) {
    for (std::size_t j = 0; j + 1 < pieces.size(); ++j) {
        for (std::size_t h = j + 1; h < pieces.size(); ++h) {
            const Arc& u = pieces[j].arc;
            const Arc& w = pieces[h].arc;
            bool disjoint = !u.covers_circle() && !w.covers_circle() &&
                            ((u.b <= w.a + kBoundaryTol) || (w.b <= u.a + kBoundaryTol));
            if (!disjoint) {
                throw std::invalid_argument("piecewise_field: segments " + std::to_string(j) +
                                            " and " + std::to_string(h) + " overlap");
            }
        }
    }
    SpatialField out(grid.n_points, fallback);
    for (int k = 0; k < grid.n_points; ++k) {
        double x = grid.node(k);
        for (const PiecewisePiece& p : pieces) {
            if (p.arc.contains(x)) {
                out[k] = p.f(x);
                break;
            }
        }
    }
    return out;
}

SpatialField piecewise_const_field(const std::vector<std::pair<Arc, double>>& pieces,
                                   double fallback, const CircleGrid& grid) {
    std::vector<PiecewisePiece> ps;
    ps.reserve(pieces.size());
    for (const auto& [arc, value] : pieces) {
        double v = value;
        ps.push_back({arc, [v](double) { return v; }});
    }
    return piecewise_field(ps, fallback, grid);
}

double circle_integral(const SpatialField& f, const CircleGrid& grid) {
    double s = 0.0;
    for (int k = 0; k < grid.n_points; ++k) s += f[k];
    return s * grid.dx;
}

double arc_integral(const SpatialField& f, const Arc& arc, const CircleGrid& grid) {
    SpatialField w = arc_weights(arc, grid);
    double s = 0.0;
    for (int k = 0; k < grid.n_points; ++k) s += w[k] * f[k];
    return s * grid.dx;
}

SpatialField centered_derivative(const SpatialField& f, const CircleGrid& grid) {
    SpatialField out(grid.n_points, 0.0);
    for (int k = 0; k < grid.n_points; ++k) {
        out[k] = (f.at_wrapped(k + 1) - f.at_wrapped(k - 1)) / (2.0 * grid.dx);
    }
    return out;
}

double rho_lower_bound(const EnvironmentSpec& env, const CircleGrid& grid) {
    double m = min_half_vprime_plus_delta(env, grid);
    return m < 0.0 ? -m : 0.0;
}

double min_half_vprime_plus_delta(const EnvironmentSpec& env, const CircleGrid& grid) {
    SpatialField vp = centered_derivative(env.v, grid);
    double m = 0.5 * vp[0] + env.delta[0];
    for (int k = 1; k < grid.n_points; ++k) m = std::min(m, 0.5 * vp[k] + env.delta[k]);
    return m;
}

}  // namespace circlegame
