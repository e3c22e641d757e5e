// Acceptance suite: each numbered criterion prints one [PASS]/[FAIL] line with
// the measured values; the exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "circlegame/scenario.hpp"
#include "../tests/oracles.hpp"

using namespace circlegame;
constexpr double pi = std::numbers::pi;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
    if (!pass) ++g_failures;
}

std::string scenario_path(const char* file) {
    return std::string(CIRCLEGAME_SCENARIO_DIR) + "/" + file;
}

double sup_diff(const SpatialField& a, const SpatialField& b) {
    double m = 0.0;
    for (int k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    return buf;
}

ScenarioConfig baseline() { return load_scenario(scenario_path("two_region_symmetric.json")); }

// ---------------------------------------------------------------- criterion 1
void criterion_alpha_correctness() {
    ScenarioConfig c = baseline();
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<AlphaProfile> alphas;
    for (const PlayerSpec& p : c.players) alphas.push_back(alpha_profile(p, c.env, c.grid));
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    double residual = 0.0;
    for (const AlphaProfile& a : alphas) residual = std::max(residual, a.residual);

    double gap = 0.0;
    for (std::size_t j = 0; j < c.players.size(); ++j) {
        SpatialField base = alpha_series_no_advection(c.partition.arcs[j].length(), 1.0,
                                                      c.players[j].rho, 0.2, c.env.sigma,
                                                      c.run.series_terms, c.grid);
        const int shift = static_cast<int>(std::lround(c.partition.arcs[j].a / c.grid.dx));
        SpatialField shifted(c.grid.n_points, 0.0);
        for (int k = 0; k < c.grid.n_points; ++k) shifted[k] = base.at_wrapped(k - shift);
        gap = std::max(gap, sup_diff(shifted, alphas[j].values));
    }
    const bool pass = residual <= 1e-8 && gap <= 1e-4 && seconds < 0.1;
    report(1, pass,
           "alpha residual " + fmt(residual) + " <= 1e-8, series gap " + fmt(gap) +
               " <= 1e-4 (512 nodes / 64 terms), runtime " + fmt(seconds) + " s < 0.1 s");
}

// ---------------------------------------------------------------- criterion 2
void criterion_alpha_bounds_monotonicity() {
    const std::vector<const char*> corpus = {
        "two_region_symmetric.json", "diffusion_sweep.json", "size_asymmetry.json",
        "productivity_split.json",   "decay_split.json",     "disutility_split.json",
        "advection_eastward.json",   "fragment_quarters.json", "fragment_whole.json"};
    bool bounds_ok = true, mono_rho_ok = true, mono_w_ok = true;
    double worst_margin = 1e300;
    for (const char* file : corpus) {
        ScenarioConfig c = load_scenario(scenario_path(file));
        for (std::size_t j = 0; j < c.players.size(); ++j) {
            AlphaProfile base = alpha_profile(c.players[j], c.env, c.grid);
            bounds_ok = bounds_ok && base.values.min() > 0.0 &&
                        base.values.max() <= base.upper_bound + 1e-8;
            worst_margin = std::min(worst_margin, base.upper_bound + 1e-8 - base.values.max());

            PlayerSpec raised = c.players[j];
            raised.rho += 0.05;
            AlphaProfile up = alpha_profile(raised, c.env, c.grid);
            double max_increase = -1e300, min_drop = 1e300;
            for (int k = 0; k < c.grid.n_points; ++k) {
                max_increase = std::max(max_increase, up.values[k] - base.values[k]);
                min_drop = std::min(min_drop, base.values[k] - up.values[k]);
            }
            mono_rho_ok = mono_rho_ok && max_increase <= 1e-12 && min_drop > 0.0;

            PlayerSpec aware = c.players[j];
            for (int k = 0; k < c.grid.n_points; ++k) aware.w[k] *= 1.1;
            AlphaProfile wup = alpha_profile(aware, c.env, c.grid);
            double max_drop = -1e300;
            for (int k = 0; k < c.grid.n_points; ++k) {
                max_drop = std::max(max_drop, base.values[k] - wup.values[k]);
            }
            mono_w_ok = mono_w_ok && max_drop <= 1e-12 && wup.values.max() > base.values.max();
        }
    }
    report(2, bounds_ok && mono_rho_ok && mono_w_ok,
           "alpha in (0, max w/rho + 1e-8] on all golden scenarios (worst slack " +
               fmt(worst_margin) + "); pointwise decrease under rho+0.05: " +
               (mono_rho_ok ? "yes" : "NO") + "; pointwise increase under w*1.1: " +
               (mono_w_ok ? "yes" : "NO"));
}

// ---------------------------------------------------------------- criterion 3
void criterion_sigma_limits() {
    ScenarioConfig c = baseline();
    ScenarioConfig small = apply_parameter(c, "sigma", 1e-4);
    ScenarioConfig large = apply_parameter(c, "sigma", 1e4);

    double small_err = 0.0;
    for (std::size_t j = 0; j < c.players.size(); ++j) {
        AlphaProfile fd = alpha_profile(small.players[j], small.env, small.grid);
        SpatialField lim = alpha_limit_zero_sigma(small.players[j], small.env, small.grid);
        for (int k = 0; k < small.grid.n_points; ++k) {
            const double x = small.grid.node(k);
            bool interior_of_some_arc = false;
            for (const Arc& m : small.partition.arcs) {
                const double band = 0.05 * m.length();
                if (x > m.a + band && x < m.b - band) interior_of_some_arc = true;
            }
            if (interior_of_some_arc) {
                small_err = std::max(small_err, std::abs(fd.values[k] - lim[k]));
            }
        }
    }

    double large_err = 0.0;
    for (std::size_t j = 0; j < c.players.size(); ++j) {
        AlphaProfile fd = alpha_profile(large.players[j], large.env, large.grid);
        const double lim = alpha_limit_infinite_sigma(large.players[j], large.env, large.grid);
        for (int k = 0; k < large.grid.n_points; ++k) {
            large_err = std::max(large_err, std::abs(fd.values[k] - lim));
        }
    }
    const bool pass = small_err <= 1e-2 && large_err <= 1e-3;
    report(3, pass,
           "sigma->0 interior error " + fmt(small_err) + " <= 1e-2 (5% bands excluded); "
           "sigma->inf error " + fmt(large_err) + " <= 1e-3");
}

// ---------------------------------------------------------------- criterion 4
void criterion_derived_scalars() {
    ScenarioConfig c = baseline();
    PlayerProfile zd = zero_diffusion_benchmark(c.players[0], c.env, c.grid);
    const long double i_oracle =
        oracles::investment_zero_diffusion(1.0L, 0.03L, 0.2L, 1.6L, 0.5L, 0.2L, 0.4L);
    const long double b_oracle = oracles::depollution(1.6L, 0.2L, 0.4L);
    const double i_err = std::abs(zd.i[10] - static_cast<double>(i_oracle));
    const double b_err = std::abs(zd.b[10] - static_cast<double>(b_oracle));
    const bool pass = i_err <= 1e-4 && b_err <= 1e-4;
    report(4, pass,
           "zero-diffusion i = " + fmt(zd.i[10]) + " (oracle gap " + fmt(i_err) +
               " <= 1e-4), b = " + fmt(zd.b[10]) + " (oracle gap " + fmt(b_err) + " <= 1e-4)");
}

// ---------------------------------------------------------------- criterion 5
void criterion_border_effect() {
    ScenarioConfig c = baseline();
    SolveArtifacts a = solve_scenario(c, false);
    bool border_ok = true;
    for (const Arc& arc : c.partition.arcs) {
        border_ok = border_ok && border_effect_check(a.nash.i, arc, c.grid).pass;
    }
    bool dominates = a.coop.has_value();
    double min_gap = 1e300;
    if (a.coop) {
        for (int k = 0; k < c.grid.n_points; ++k) {
            const double gap = a.nash.i[k] - a.coop->profile.i[k];
            min_gap = std::min(min_gap, gap);
            if (!(gap > 0.0)) dominates = false;
        }
    }
    report(5, border_ok && dominates,
           std::string("within each arc i* has its minimum at the midpoint and is monotone toward "
                       "both borders: ") +
               (border_ok ? "yes" : "NO") + "; Nash i* > cooperative i* at every inhabited node "
               "(min gap " + fmt(min_gap) + ")");
}

// ---------------------------------------------------------------- criterion 6
void criterion_size_effect() {
    ScenarioConfig c = load_scenario(scenario_path("size_asymmetry.json"));
    SolveArtifacts a = solve_scenario(c, false);
    double min_small = 1e300, max_large = -1e300;
    const Arc big = c.partition.arcs[0];    // 3*pi/2 long
    const Arc small = c.partition.arcs[1];  // pi/2 long
    for (int k = 0; k < c.grid.n_points; ++k) {
        const double x = c.grid.node(k);
        if (small.contains(x)) min_small = std::min(min_small, a.nash.i[k]);
        if (big.contains(x)) max_large = std::max(max_large, a.nash.i[k]);
    }
    const bool pass = min_small > max_large;
    report(6, pass,
           "min i* on the quarter arc " + fmt(min_small) + " > max i* on the three-quarter arc " +
               fmt(max_large));
}

// ---------------------------------------------------------------- criterion 7
void criterion_sigma_sweep() {
    ScenarioConfig c = baseline();
    const int mid = c.grid.nearest_node(pi / 2.0);
    PlayerProfile zd = zero_diffusion_benchmark(c.players[0], c.env, c.grid);
    PlayerProfile il = infinite_diffusion_benchmark(c.players[0], c.env, c.grid);

    std::vector<double> mids;
    bool increasing = true, bracketed = true;
    for (double sigma : {0.4, 0.8, 1.6, 3.2}) {
        ScenarioConfig cs = apply_parameter(c, "sigma", sigma);
        AlphaProfile a = alpha_profile(cs.players[0], cs.env, cs.grid);
        PlayerProfile prof = nash_strategies(a.values, cs.players[0], cs.env, cs.grid);
        mids.push_back(prof.i[mid]);
        bracketed = bracketed && zd.i[mid] < mids.back() && mids.back() < il.i[mid];
        if (mids.size() > 1 && !(mids.back() > mids[mids.size() - 2])) increasing = false;
    }
    report(7, increasing && bracketed,
           "midpoint i* over sigma {0.4, 0.8, 1.6, 3.2} = {" + fmt(mids[0]) + ", " + fmt(mids[1]) +
               ", " + fmt(mids[2]) + ", " + fmt(mids[3]) + "} strictly increasing and inside (" +
               fmt(zd.i[mid]) + ", " + fmt(il.i[mid]) + ")");
}

// ---------------------------------------------------------------- criterion 8
void criterion_advection() {
    ScenarioConfig c = load_scenario(scenario_path("advection_eastward.json"));
    SolveArtifacts a = solve_scenario(c, false);

    double asym = 1e300;
    for (const Arc& arc : c.partition.arcs) {
        asym = std::min(asym, asymmetry_index(a.nash.i, arc, c.grid));
    }

    ScenarioConfig flipped = apply_parameter(c, "v", +0.08);
    SolveArtifacts b = solve_scenario(flipped, false);

    double mirror_err = 0.0;
    const int n = c.grid.n_points;
    for (std::size_t j = 0; j < c.players.size(); ++j) {
        const Arc arc = c.partition.arcs[j];
        const int ka = static_cast<int>(std::lround(arc.a / c.grid.dx));
        const int kb = static_cast<int>(std::lround(arc.b / c.grid.dx));
        // alpha and the steady state are continuous: compare at every node
        for (int k = 0; k < n; ++k) {
            const int m = ((ka + kb - k) % n + n) % n;
            mirror_err =
                std::max(mirror_err, std::abs(a.alphas[j].values[k] - b.alphas[j].values[m]));
            if (j == 0) {
                mirror_err = std::max(mirror_err, std::abs(a.steady.p[k] - b.steady.p[m]));
            }
        }
        // strategy fields jump at the borders: compare where both node and mirror are owned
        for (int k = ka + 1; k < kb; ++k) {
            const int kk = ((k % n) + n) % n;
            const int m = ((ka + kb - k) % n + n) % n;
            mirror_err = std::max(mirror_err, std::abs(a.nash.i[kk] - b.nash.i[m]));
            mirror_err = std::max(mirror_err, std::abs(a.nash.n[kk] - b.nash.n[m]));
            mirror_err = std::max(mirror_err, std::abs(a.nash.c[kk] - b.nash.c[m]));
        }
    }
    const bool pass = asym > 1e-3 && mirror_err <= 1e-8;
    report(8, pass,
           "asymmetry index " + fmt(asym) + " > 1e-3 in each arc at v = -0.08; flipping v mirrors "
           "alpha, strategies and the steady state to " + fmt(mirror_err) + " <= 1e-8");
}

// ---------------------------------------------------------------- criterion 9
void criterion_dynamics() {
    // single-mode decay at dt = 1e-3 (fine grid so the spatial floor sits below 1e-6)
    CircleGrid g = build_grid(2048);
    EnvironmentSpec env;
    env.sigma = 0.5;
    env.delta = SpatialField(g.n_points, 0.2);
    env.v = SpatialField(g.n_points, 0.0);
    env.eta = 0.2;
    env.theta = 0.4;
    SpatialField p0 = sample(g, [](double x) { return std::cos(x); });
    SpatialField zero(g.n_points, 0.0);
    Trajectory tr = simulate(p0, zero, env, g, 1.0, 1e-3, 1);
    double decay_err = 0.0;
    for (int k = 0; k < g.n_points; ++k) {
        decay_err =
            std::max(decay_err, std::abs(tr.states.back()[k] - std::exp(-0.7) * std::cos(g.node(k))));
    }

    // observed temporal order between dt = 0.1 and dt = 0.05
    auto terminal_err = [&](double dt) {
        Trajectory t = simulate(p0, zero, env, g, 1.0, dt, 1);
        double e = 0.0;
        for (int k = 0; k < g.n_points; ++k) {
            e = std::max(e, std::abs(t.states.back()[k] - std::exp(-0.7) * std::cos(g.node(k))));
        }
        return e;
    };
    const double order = std::log2(terminal_err(0.1) / terminal_err(0.05));

    // long-horizon agreement with the direct steady solve on the baseline scenario
    ScenarioConfig c = baseline();
    SolveArtifacts a = solve_scenario(c, false);
    Trajectory full =
        simulate(c.p0, a.nash_solver_n, c.env, c.grid, 60.0, 0.01, 60, &a.steady.p);
    const double final_gap = full.gap.back();

    // mass balance of the discrete steady state
    double decay_mass = 0.0;
    for (int k = 0; k < c.grid.n_points; ++k) decay_mass += c.env.delta[k] * a.steady.p[k];
    decay_mass *= c.grid.dx;
    const double balance_gap = std::abs(decay_mass - circle_integral(a.nash_solver_n, c.grid));
    const double balance_own = std::abs(decay_mass - circle_integral(a.nash.n, c.grid));

    const bool pass =
        decay_err <= 1e-6 && order >= 1.9 && final_gap <= 1e-4 && balance_gap <= 1e-10 &&
        balance_own <= 1e-10;
    report(9, pass,
           "single-mode decay error " + fmt(decay_err) + " <= 1e-6 at dt = 1e-3; time order " +
               fmt(order) + " >= 1.9; simulate(T=60) vs steady state " + fmt(final_gap) +
               " <= 1e-4; mass balance " + fmt(balance_gap) + " (solver rhs) / " +
               fmt(balance_own) + " (owned field) <= 1e-10");
}

// --------------------------------------------------------------- criterion 10
void criterion_fragmentation() {
    ScenarioConfig quarters = load_scenario(scenario_path("fragment_quarters.json"));
    ScenarioConfig halves = load_scenario(scenario_path("fragment_halves.json"));
    ScenarioConfig whole = load_scenario(scenario_path("fragment_whole.json"));

    const std::string dir = "acceptance_fragment_out";
    FragmentationReport qh = run_fragment(quarters, halves, 60.0, dir + "/quarters_vs_halves");
    FragmentationReport hw = run_fragment(halves, whole, 60.0, dir + "/halves_vs_whole");
    std::filesystem::remove_all(dir);

    const bool pass = qh.pass && hw.pass;
    report(10, pass,
           "p_fine - p_coarse >= -1e-10 at every stored (t, x) and at the steady state: "
           "quarters vs halves min " + fmt(qh.min_gap_trajectory) + " / steady " +
               fmt(qh.min_gap_steady) + ", halves vs whole min " + fmt(hw.min_gap_trajectory) +
               " / steady " + fmt(hw.min_gap_steady));
}

// --------------------------------------------------------------- criterion 11
std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "<unreadable:" + path + ">";
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_determinism() {
    const std::string scn = scenario_path("two_region_symmetric.json");
    const std::string dir1 = "acceptance_det_a";
    const std::string dir2 = "acceptance_det_b";
    bool pass = false;
    std::string how;
#ifdef CIRCLEGAME_CLI_PATH
    const std::string cmd1 = std::string("\"") + CIRCLEGAME_CLI_PATH + "\" solve --scenario \"" +
                             scn + "\" --no-check --out " + dir1 + " > /dev/null";
    const std::string cmd2 = std::string("\"") + CIRCLEGAME_CLI_PATH + "\" solve --scenario \"" +
                             scn + "\" --no-check --out " + dir2 + " > /dev/null";
    const int rc1 = std::system(cmd1.c_str());
    const int rc2 = std::system(cmd2.c_str());
    pass = rc1 == 0 && rc2 == 0 &&
           read_file(dir1 + "/profiles.csv") == read_file(dir2 + "/profiles.csv");
    how = "two CLI invocations";
#else
    ScenarioConfig c = load_scenario(scn);
    write_solve_outputs(solve_scenario(c, false), c, dir1);
    write_solve_outputs(solve_scenario(c, false), c, dir2);
    pass = read_file(dir1 + "/profiles.csv") == read_file(dir2 + "/profiles.csv");
    how = "two library runs";
#endif
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
    report(11, pass, how + " on the same scenario produce byte-identical profiles.csv");
}

}  // namespace

int main() {
    try {
        criterion_alpha_correctness();
        criterion_alpha_bounds_monotonicity();
        criterion_sigma_limits();
        criterion_derived_scalars();
        criterion_border_effect();
        criterion_size_effect();
        criterion_sigma_sweep();
        criterion_advection();
        criterion_dynamics();
        criterion_fragmentation();
        criterion_determinism();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance suite aborted: %s\n", e.what());
        return 99;
    }
    std::printf("%s: %d criterion(s) failed\n", g_failures == 0 ? "OK" : "FAILED", g_failures);
    return g_failures;
}
