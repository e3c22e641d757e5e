#include "circlegame/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace circlegame {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
    std::string out = "scenario validation failed:";
    for (const std::string& s : issues) {
        out += "\n  - " + s;
    }
    return out;
}

struct Issues {
    std::vector<std::string> list;
    void add(std::string s) { list.push_back(std::move(s)); }
    bool any() const { return !list.empty(); }
    void raise_if_any() {
        if (any()) throw ScenarioError(std::move(list));
    }
};

std::string fmt(double x) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

class StageTimer {
public:
    StageTimer() : t0_(std::chrono::steady_clock::now()) {}
    double ms() const {
        auto d = std::chrono::steady_clock::now() - t0_;
        return std::chrono::duration<double, std::milli>(d).count();
    }
    void reset() { t0_ = std::chrono::steady_clock::now(); }

private:
    std::chrono::steady_clock::time_point t0_;
};

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

std::optional<double> parse_pi_expr(const std::string& text) {
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    }
    if (s.empty()) return std::nullopt;

    auto parse_number = [](const std::string& t) -> std::optional<double> {
        double val = 0.0;
        const char* first = t.data();
        const char* last = t.data() + t.size();
        auto res = std::from_chars(first, last, val);
        if (res.ec == std::errc() && res.ptr == last) return val;
        return std::nullopt;
    };

    if (auto plain = parse_number(s)) return plain;

    const std::size_t pos = s.find("pi");
    if (pos == std::string::npos) return std::nullopt;

    double coef = 1.0;
    std::string head = s.substr(0, pos);
    if (!head.empty()) {
        if (head.back() == '*') head.pop_back();
        if (head == "-") {
            coef = -1.0;
        } else if (head == "+") {
            coef = 1.0;
        } else if (!head.empty()) {
            auto c = parse_number(head);
            if (!c) return std::nullopt;
            coef = *c;
        }
    }
    double div = 1.0;
    std::string tail = s.substr(pos + 2);
    if (!tail.empty()) {
        if (tail.front() != '/') return std::nullopt;
        auto d = parse_number(tail.substr(1));
        if (!d || *d == 0.0) return std::nullopt;
        div = *d;
    }
    return coef * std::numbers::pi / div;
}

SpatialField PiecewiseSpec::sample_on(const CircleGrid& grid) const {
    return piecewise_const_field(segments, fallback, grid);
}

bool PiecewiseSpec::is_constant() const {
    return std::all_of(segments.begin(), segments.end(),
                       [&](const auto& s) { return s.second == fallback; });
}

bool ScenarioConfig::constant_coefficients() const {
    if (!delta_spec.is_constant() || !v_spec.is_constant()) return false;
    for (const PiecewiseSpec& w : w_specs) {
        if (!w.is_constant()) return false;
    }
    return true;
}

bool ScenarioConfig::homogeneous_preferences() const {
    for (const PlayerSpec& p : players) {
        if (p.rho != players.front().rho || p.gamma != players.front().gamma) return false;
    }
    return true;
}

// ------------------------------ parsing ------------------------------

namespace {

double angle_from_json(const json& v, const std::string& path, Issues& issues) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        if (auto x = parse_pi_expr(v.get<std::string>())) return *x;
        issues.add(path + ": cannot parse '" + v.get<std::string>() +
                   "' (expected a number or a pi expression like \"3*pi/2\")");
        return 0.0;
    }
    issues.add(path + ": expected a number or a pi-expression string");
    return 0.0;
}

std::optional<Arc> arc_from_json(const json& v, const std::string& path, Issues& issues) {
    if (!v.is_array() || v.size() != 2) {
        issues.add(path + ": expected an array [a, b]");
        return std::nullopt;
    }
    Arc arc;
    arc.a = angle_from_json(v[0], path + "[0]", issues);
    arc.b = angle_from_json(v[1], path + "[1]", issues);
    return arc;
}

PiecewiseSpec piecewise_from_json(const json& v, const std::string& path, Issues& issues) {
    PiecewiseSpec spec;
    if (v.is_number()) {
        spec.fallback = v.get<double>();
        return spec;
    }
    if (v.is_object()) {
        if (!v.contains("default") || !v["default"].is_number()) {
            issues.add(path + ".default: required number for a piecewise value");
        } else {
            spec.fallback = v["default"].get<double>();
        }
        if (v.contains("segments")) {
            if (!v["segments"].is_array()) {
                issues.add(path + ".segments: expected an array");
                return spec;
            }
            int idx = 0;
            for (const json& seg : v["segments"]) {
                const std::string spath = path + ".segments[" + std::to_string(idx) + "]";
                if (!seg.is_object() || !seg.contains("arc") || !seg.contains("value") ||
                    !seg["value"].is_number()) {
                    issues.add(spath + ": expected {\"arc\": [a,b], \"value\": number}");
                } else if (auto arc = arc_from_json(seg["arc"], spath + ".arc", issues)) {
                    spec.segments.emplace_back(*arc, seg["value"].get<double>());
                }
                ++idx;
            }
        }
        return spec;
    }
    issues.add(path + ": expected a number or {default, segments}");
    return spec;
}

double number_from_json(const json& parent, const char* key, const std::string& section,
                        Issues& issues, std::optional<double> fallback = std::nullopt) {
    if (!parent.contains(key)) {
        if (fallback) return *fallback;
        issues.add(section + "." + key + ": missing required number");
        return 0.0;
    }
    if (!parent[key].is_number()) {
        issues.add(section + "." + key + ": expected a number");
        return fallback.value_or(0.0);
    }
    return parent[key].get<double>();
}

void validate_built(ScenarioConfig& c, Issues& issues) {
    const CircleGrid& grid = c.grid;

    if (!(c.env.sigma > 0.0)) issues.add("environment.sigma: diffusivity must be positive");
    if (!(c.env.theta > 0.0 && c.env.theta < 1.0)) {
        issues.add("environment.theta: must lie strictly inside (0,1), got " + fmt(c.env.theta));
    }
    if (c.env.eta < 0.0) issues.add("environment.eta: must be nonnegative");
    for (int k = 0; k < grid.n_points; ++k) {
        if (c.env.delta[k] < 0.0) {
            issues.add("environment.delta: negative at node " + std::to_string(k));
            break;
        }
    }
    if (c.env.v.max() - c.env.v.min() != 0.0) {
        issues.add(
            "environment.v: piecewise values with jumps are not continuously differentiable; "
            "supply a single constant");
    }
    for (int k = 0; k < grid.n_points; ++k) {
        if (c.p0[k] < 0.0) {
            issues.add("initial_pollution: negative at node " + std::to_string(k));
            break;
        }
    }

    // Arc geometry, pairwise overlap (naming both arcs), node counts.
    const std::size_t N = c.partition.arcs.size();
    for (std::size_t j = 0; j < N; ++j) {
        const Arc& m = c.partition.arcs[j];
        const std::string who = "players[" + std::to_string(j + 1) + "].arc";
        if (!(m.a >= 0.0 && m.a < m.b && m.b <= two_pi + 1e-12)) {
            issues.add(who + ": need 0 <= a < b <= 2*pi");
            continue;
        }
        int count = 0;
        for (int k = 0; k < grid.n_points; ++k) count += m.contains(grid.node(k)) ? 1 : 0;
        if (count < 2) issues.add(who + ": holds fewer than 2 grid nodes at this resolution");
    }
    for (std::size_t j = 0; j + 1 < N; ++j) {
        for (std::size_t h = j + 1; h < N; ++h) {
            const Arc& u = c.partition.arcs[j];
            const Arc& w = c.partition.arcs[h];
            bool disjoint = !u.covers_circle() && !w.covers_circle() &&
                            ((u.b <= w.a + 1e-12) || (w.b <= u.a + 1e-12));
            if (!disjoint) {
                issues.add("players[" + std::to_string(j + 1) + "].arc and players[" +
                           std::to_string(h + 1) + "].arc overlap");
            }
        }
    }
    if (c.partition.total_length() > two_pi + 1e-9) {
        issues.add("players: arc lengths sum to more than 2*pi");
    }

    const double bound = rho_lower_bound(c.env, grid);
    for (std::size_t j = 0; j < N; ++j) {
        const PlayerSpec& p = c.players[j];
        const std::string who = "players[" + std::to_string(j + 1) + "]";
        if (!(p.rho > 0.0)) issues.add(who + ".rho: discount rate must be positive");
        if (!(p.rho > bound)) {
            issues.add(who + ".rho: too small; must exceed |min(v'/2 + delta, 0)| = " + fmt(bound));
        }
        if (!(p.gamma > 0.0) || p.gamma == 1.0) {
            issues.add(who + ".gamma: must lie in (0,1) or (1,inf), got " + fmt(p.gamma));
        }
        SpatialField weights = arc_weights(p.arc, grid);
        for (int k = 0; k < grid.n_points; ++k) {
            if (weights[k] > 0.0 && !(p.w[k] > 0.0)) {
                issues.add(who + ".w: must be positive on the territory closure (node " +
                           std::to_string(k) + ")");
                break;
            }
        }
        for (int k = 0; k < grid.n_points; ++k) {
            if (weights[k] > 0.0 && !(p.A[k] > 1.0)) {
                issues.add(who + ".A: productivity must exceed 1 on the territory (node " +
                           std::to_string(k) + ")");
                break;
            }
        }
    }

    if (!(min_half_vprime_plus_delta(c.env, grid) > 0.0)) {
        issues.add(
            "environment.delta: min(v'/2 + delta) must be positive for the steady state "
            "(long-run profile) to exist");
    }

    if (!(c.run.dt > 0.0)) issues.add("run.dt: must be positive");
    if (!(c.run.T > 0.0)) issues.add("run.T: must be positive");
    if (c.run.series_terms < 1) issues.add("run.series_terms: must be at least 1");
    if (c.run.n_samples < 1) issues.add("run.n_samples: must be at least 1");

    static const std::vector<std::string> known_checks = {"border_effect", "size_effect",
                                                          "advection_asymmetry"};
    for (const std::string& name : c.checks) {
        if (std::find(known_checks.begin(), known_checks.end(), name) == known_checks.end()) {
            issues.add("checks: unknown check '" + name + "'");
        }
    }
    if (c.sweep && c.sweep->values.empty()) {
        issues.add("sweep.values: must not be empty");
    }
}

void resample(ScenarioConfig& c) {
    c.env.delta = c.delta_spec.sample_on(c.grid);
    c.env.v = c.v_spec.sample_on(c.grid);
    c.p0 = c.p0_spec.sample_on(c.grid);
    for (std::size_t j = 0; j < c.players.size(); ++j) {
        c.players[j].w = c.w_specs[j].sample_on(c.grid);
        c.players[j].A = c.A_specs[j].sample_on(c.grid);
    }
}

}  // namespace

ScenarioConfig load_scenario_text(const std::string& text, const std::string& name) {
    Issues issues;
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        issues.add(std::string("parse error: ") + e.what());
        issues.raise_if_any();
    }
    if (!root.is_object()) {
        issues.add("top level: expected an object");
        issues.raise_if_any();
    }

    ScenarioConfig c;
    c.name = root.value("name", name);

    // grid
    int n_points = 0;
    if (!root.contains("grid") || !root["grid"].is_object() ||
        !root["grid"].contains("n_points") || !root["grid"]["n_points"].is_number_integer()) {
        issues.add("grid.n_points: missing required integer");
    } else {
        n_points = root["grid"]["n_points"].get<int>();
        try {
            c.grid = CircleGrid::make(n_points);
        } catch (const std::invalid_argument& e) {
            issues.add(e.what());
        }
    }
    issues.raise_if_any();  // nothing else is checkable without a grid

    // environment
    if (!root.contains("environment") || !root["environment"].is_object()) {
        issues.add("environment: missing required section");
        issues.raise_if_any();
    }
    const json& env = root["environment"];
    c.env.sigma = number_from_json(env, "sigma", "environment", issues);
    c.env.eta = number_from_json(env, "eta", "environment", issues);
    c.env.theta = number_from_json(env, "theta", "environment", issues);
    c.delta_spec = env.contains("delta") ? piecewise_from_json(env["delta"], "environment.delta", issues)
                                         : PiecewiseSpec{};
    if (!env.contains("delta")) issues.add("environment.delta: missing required value");
    c.v_spec = env.contains("v") ? piecewise_from_json(env["v"], "environment.v", issues)
                                 : PiecewiseSpec{};

    // players
    if (!root.contains("players") || !root["players"].is_array() || root["players"].empty()) {
        issues.add("players: required non-empty array");
        issues.raise_if_any();
    }
    int index = 1;
    for (const json& pj : root["players"]) {
        const std::string section = "players[" + std::to_string(index) + "]";
        PlayerSpec p;
        p.index = index;
        if (!pj.is_object()) {
            issues.add(section + ": expected an object");
            ++index;
            continue;
        }
        if (!pj.contains("arc")) {
            issues.add(section + ".arc: missing required [a, b]");
        } else if (auto arc = arc_from_json(pj["arc"], section + ".arc", issues)) {
            p.arc = *arc;
        }
        p.rho = number_from_json(pj, "rho", section, issues);
        p.gamma = number_from_json(pj, "gamma", section, issues);
        c.w_specs.push_back(pj.contains("w") ? piecewise_from_json(pj["w"], section + ".w", issues)
                                             : (issues.add(section + ".w: missing required value"),
                                                PiecewiseSpec{}));
        c.A_specs.push_back(pj.contains("A") ? piecewise_from_json(pj["A"], section + ".A", issues)
                                             : (issues.add(section + ".A: missing required value"),
                                                PiecewiseSpec{}));
        c.partition.arcs.push_back(p.arc);
        c.players.push_back(std::move(p));
        ++index;
    }

    c.p0_spec = root.contains("initial_pollution")
                    ? piecewise_from_json(root["initial_pollution"], "initial_pollution", issues)
                    : PiecewiseSpec{};

    if (root.contains("run")) {
        const json& run = root["run"];
        if (!run.is_object()) {
            issues.add("run: expected an object");
        } else {
            c.run.dt = number_from_json(run, "dt", "run", issues, c.run.dt);
            c.run.T = number_from_json(run, "T", "run", issues, c.run.T);
            c.run.series_terms = static_cast<int>(
                number_from_json(run, "series_terms", "run", issues, c.run.series_terms));
            c.run.n_samples =
                static_cast<int>(number_from_json(run, "n_samples", "run", issues, c.run.n_samples));
            c.run.alpha_residual_tol = number_from_json(run, "alpha_residual_tol", "run", issues,
                                                        c.run.alpha_residual_tol);
            c.run.steady_match_tol =
                number_from_json(run, "steady_match_tol", "run", issues, c.run.steady_match_tol);
            c.run.ordering_slack =
                number_from_json(run, "ordering_slack", "run", issues, c.run.ordering_slack);
            c.run.series_gap_tol =
                number_from_json(run, "series_gap_tol", "run", issues, c.run.series_gap_tol);
        }
    }

    if (root.contains("checks")) {
        if (!root["checks"].is_array()) {
            issues.add("checks: expected an array of names");
        } else {
            for (const json& chk : root["checks"]) {
                if (chk.is_string()) {
                    c.checks.push_back(chk.get<std::string>());
                } else {
                    issues.add("checks: entries must be strings");
                }
            }
        }
    }

    if (root.contains("sweep")) {
        const json& sw = root["sweep"];
        SweepSpec spec;
        if (!sw.is_object() || !sw.contains("parameter") || !sw["parameter"].is_string() ||
            !sw.contains("values") || !sw["values"].is_array()) {
            issues.add("sweep: expected {\"parameter\": name, \"values\": [..]}");
        } else {
            spec.parameter = sw["parameter"].get<std::string>();
            for (const json& v : sw["values"]) {
                if (v.is_number()) {
                    spec.values.push_back(v.get<double>());
                } else {
                    issues.add("sweep.values: entries must be numbers");
                }
            }
            c.sweep = std::move(spec);
        }
    }

    issues.raise_if_any();

    resample(c);
    validate_built(c, issues);
    issues.raise_if_any();
    return c;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError({"cannot open scenario file: " + path});
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return load_scenario_text(ss.str(), std::filesystem::path(path).stem().string());
}

ScenarioConfig with_grid(const ScenarioConfig& base, int n_points) {
    ScenarioConfig c = base;
    c.grid = CircleGrid::make(n_points);
    resample(c);
    Issues issues;
    validate_built(c, issues);
    issues.raise_if_any();
    return c;
}

ScenarioConfig apply_parameter(const ScenarioConfig& base, const std::string& name, double value) {
    ScenarioConfig c = base;
    auto player_slot = [&](const std::string& prefix) -> int {
        if (name.rfind(prefix, 0) != 0) return -1;
        const std::string tail = name.substr(prefix.size());
        if (tail.empty() || !std::all_of(tail.begin(), tail.end(), [](char ch) {
                return std::isdigit(static_cast<unsigned char>(ch));
            })) {
            return -1;
        }
        const int j = std::stoi(tail);
        if (j < 1 || j > static_cast<int>(c.players.size())) {
            throw std::invalid_argument("sweep: no player " + tail + " for parameter '" + name + "'");
        }
        return j - 1;
    };

    if (name == "sigma") {
        c.env.sigma = value;
    } else if (name == "eta") {
        c.env.eta = value;
    } else if (name == "theta") {
        c.env.theta = value;
    } else if (name == "v") {
        c.v_spec = PiecewiseSpec{value, {}};
    } else if (int j = player_slot("rho_"); j >= 0) {
        c.players[static_cast<std::size_t>(j)].rho = value;
    } else if (int j2 = player_slot("gamma_"); j2 >= 0) {
        c.players[static_cast<std::size_t>(j2)].gamma = value;
    } else if (int j3 = player_slot("w_"); j3 >= 0) {
        c.w_specs[static_cast<std::size_t>(j3)] = PiecewiseSpec{value, {}};
    } else if (int j4 = player_slot("A_"); j4 >= 0) {
        c.A_specs[static_cast<std::size_t>(j4)] = PiecewiseSpec{value, {}};
    } else {
        throw std::invalid_argument(
            "sweep: unknown parameter '" + name +
            "' (expected sigma, eta, theta, v, or rho_<j>/gamma_<j>/w_<j>/A_<j>)");
    }
    resample(c);
    Issues issues;
    validate_built(c, issues);
    issues.raise_if_any();
    return c;
}

// ------------------------------ reports ------------------------------

namespace {

FieldStats stats_over_arc(const SpatialField& f, const Arc& arc, const CircleGrid& grid) {
    FieldStats s;
    bool first = true;
    double sum = 0.0;
    int count = 0;
    for (int k = 0; k < grid.n_points; ++k) {
        if (!arc.contains(grid.node(k))) continue;
        const double x = f[k];
        if (first) {
            s.min = s.max = x;
            first = false;
        } else {
            s.min = std::min(s.min, x);
            s.max = std::max(s.max, x);
        }
        sum += x;
        ++count;
    }
    s.mean = count > 0 ? sum / count : 0.0;
    return s;
}

FieldStats stats_global(const SpatialField& f) {
    FieldStats s{f.min(), f.max(), 0.0};
    double sum = 0.0;
    for (int k = 0; k < f.size(); ++k) sum += f[k];
    s.mean = sum / f.size();
    return s;
}

ordered_json stats_to_json(const FieldStats& s) {
    return ordered_json{{"min", s.min}, {"max", s.max}, {"mean", s.mean}};
}

FieldStats stats_from_json(const json& j) {
    return {j.at("min").get<double>(), j.at("max").get<double>(), j.at("mean").get<double>()};
}

ordered_json steady_to_json(const SteadyReport& s) {
    return ordered_json{{"p", stats_to_json(s.p)},
                        {"residual", s.residual},
                        {"mass_balance_gap", s.mass_balance_gap}};
}

SteadyReport steady_from_json(const json& j) {
    return {stats_from_json(j.at("p")), j.at("residual").get<double>(),
            j.at("mass_balance_gap").get<double>()};
}

}  // namespace

std::string run_report_to_json(const RunReport& r) {
    ordered_json j;
    j["scenario"] = r.scenario;
    j["n_points"] = r.n_points;
    j["players"] = ordered_json::array();
    for (const PlayerReport& p : r.players) {
        ordered_json pj;
        pj["index"] = p.index;
        pj["alpha_min"] = p.alpha_min;
        pj["alpha_max"] = p.alpha_max;
        pj["alpha_residual"] = p.alpha_residual;
        pj["q"] = p.q;
        pj["alpha_inner"] = p.alpha_inner;
        pj["v"] = p.v;
        pj["i"] = stats_to_json(p.i);
        pj["b"] = stats_to_json(p.b);
        pj["n"] = stats_to_json(p.n);
        pj["y"] = stats_to_json(p.y);
        pj["c"] = stats_to_json(p.c);
        j["players"].push_back(std::move(pj));
    }
    j["has_cooperative"] = r.has_cooperative;
    if (r.has_cooperative) {
        j["cooperative"] = ordered_json{{"residual", r.coop_residual},
                                        {"q", r.coop_q},
                                        {"alpha_inner", r.coop_alpha_inner},
                                        {"v", r.coop_v},
                                        {"alpha", stats_to_json(r.coop_alpha)}};
    }
    j["steady_state"] = steady_to_json(r.steady);
    if (r.steady_coop) j["steady_state_cooperative"] = steady_to_json(*r.steady_coop);
    j["checks"] = ordered_json::array();
    for (const CheckResult& c : r.checks) {
        j["checks"].push_back(ordered_json{
            {"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"threshold", c.threshold}});
    }
    j["timings_ms"] = ordered_json(r.timings_ms);
    return j.dump(2) + "\n";
}

RunReport run_report_from_json(const std::string& text) {
    const json j = json::parse(text);
    RunReport r;
    r.scenario = j.at("scenario").get<std::string>();
    r.n_points = j.at("n_points").get<int>();
    for (const json& pj : j.at("players")) {
        PlayerReport p;
        p.index = pj.at("index").get<int>();
        p.alpha_min = pj.at("alpha_min").get<double>();
        p.alpha_max = pj.at("alpha_max").get<double>();
        p.alpha_residual = pj.at("alpha_residual").get<double>();
        p.q = pj.at("q").get<double>();
        p.alpha_inner = pj.at("alpha_inner").get<double>();
        p.v = pj.at("v").get<double>();
        p.i = stats_from_json(pj.at("i"));
        p.b = stats_from_json(pj.at("b"));
        p.n = stats_from_json(pj.at("n"));
        p.y = stats_from_json(pj.at("y"));
        p.c = stats_from_json(pj.at("c"));
        r.players.push_back(std::move(p));
    }
    r.has_cooperative = j.at("has_cooperative").get<bool>();
    if (r.has_cooperative) {
        const json& cj = j.at("cooperative");
        r.coop_residual = cj.at("residual").get<double>();
        r.coop_q = cj.at("q").get<double>();
        r.coop_alpha_inner = cj.at("alpha_inner").get<double>();
        r.coop_v = cj.at("v").get<double>();
        r.coop_alpha = stats_from_json(cj.at("alpha"));
    }
    r.steady = steady_from_json(j.at("steady_state"));
    if (j.contains("steady_state_cooperative")) {
        r.steady_coop = steady_from_json(j.at("steady_state_cooperative"));
    }
    for (const json& cj : j.at("checks")) {
        r.checks.push_back(CheckResult{cj.at("name").get<std::string>(), cj.at("pass").get<bool>(),
                                       cj.at("value").get<double>(),
                                       cj.at("threshold").get<double>()});
    }
    for (const auto& [key, val] : j.at("timings_ms").items()) {
        r.timings_ms[key] = val.get<double>();
    }
    return r;
}

// ------------------------------ solve pipeline ------------------------------

namespace {

double mass_balance_gap(const SpatialField& p_inf, const SpatialField& solver_rhs,
                        const EnvironmentSpec& env, const CircleGrid& grid) {
    // Integrating (-L) p = n over the circle leaves integral((delta + v') p) = integral(n):
    // the transport and diffusion sums telescope on the periodic grid.
    SpatialField vp = centered_derivative(env.v, grid);
    double lhs = 0.0;
    for (int k = 0; k < grid.n_points; ++k) {
        lhs += (env.delta[k] + vp[k]) * p_inf[k];
    }
    return std::abs(lhs * grid.dx - circle_integral(solver_rhs, grid));
}

// Closed-form series for one player's alpha, shifted so the arc starts at x = a.
// Only valid for constant-coefficient scenarios with node-aligned arcs.
std::optional<SpatialField> shifted_series(const ScenarioConfig& c, std::size_t j) {
    const Arc& arc = c.partition.arcs[j];
    const double a_over_dx = arc.a / c.grid.dx;
    if (std::abs(a_over_dx - std::round(a_over_dx)) > 1e-9) return std::nullopt;
    const int shift = static_cast<int>(std::lround(a_over_dx));
    const double w0 = c.w_specs[j].fallback;
    const double delta0 = c.delta_spec.fallback;
    const double v0 = c.v_spec.fallback;
    SpatialField base =
        (v0 == 0.0)
            ? alpha_series_no_advection(arc.length(), w0, c.players[j].rho, delta0, c.env.sigma,
                                        c.run.series_terms, c.grid)
            : alpha_series_advection(arc.length(), w0, c.players[j].rho, delta0, c.env.sigma, v0,
                                     c.run.series_terms, c.grid);
    SpatialField out(c.grid.n_points, 0.0);
    for (int k = 0; k < c.grid.n_points; ++k) out[k] = base.at_wrapped(k - shift);
    return out;
}

void append_declared_checks(const ScenarioConfig& c, const SolveArtifacts& a,
                            std::vector<CheckResult>& checks) {
    for (const std::string& name : c.checks) {
        if (name == "border_effect") {
            for (std::size_t j = 0; j < c.players.size(); ++j) {
                BorderEffectResult r =
                    border_effect_check(a.nash.i, c.partition.arcs[j], c.grid);
                checks.push_back({"border_effect_player" + std::to_string(j + 1), r.pass,
                                  r.pass ? 1.0 : 0.0, 1.0});
            }
        } else if (name == "size_effect") {
            std::size_t js = 0, jl = 0;
            for (std::size_t j = 1; j < c.partition.arcs.size(); ++j) {
                if (c.partition.arcs[j].length() < c.partition.arcs[js].length()) js = j;
                if (c.partition.arcs[j].length() > c.partition.arcs[jl].length()) jl = j;
            }
            FieldStats small = stats_over_arc(a.nash.i, c.partition.arcs[js], c.grid);
            FieldStats large = stats_over_arc(a.nash.i, c.partition.arcs[jl], c.grid);
            const double margin = small.min - large.max;
            checks.push_back({"size_effect", margin > 0.0, margin, 0.0});
        } else if (name == "advection_asymmetry") {
            const double v0 = c.env.v[0];
            for (std::size_t j = 0; j < c.players.size(); ++j) {
                const double idx = asymmetry_index(a.nash.i, c.partition.arcs[j], c.grid);
                const double skew = border_skew(a.nash.i, c.partition.arcs[j], c.grid);
                const bool sign_ok = skew * (-v0) > 0.0;
                checks.push_back({"advection_asymmetry_player" + std::to_string(j + 1),
                                  idx > 1e-3 && sign_ok, idx, 1e-3});
            }
        }
    }
}

}  // namespace

SolveArtifacts solve_scenario(const ScenarioConfig& c, bool run_checks) {
    SolveArtifacts a;
    RunReport& rep = a.report;
    rep.scenario = c.name;
    rep.n_points = c.grid.n_points;

    StageTimer total;
    StageTimer stage;
    for (const PlayerSpec& p : c.players) {
        a.alphas.push_back(alpha_profile(p, c.env, c.grid));
    }
    rep.timings_ms["alpha"] = stage.ms();

    stage.reset();
    for (std::size_t j = 0; j < c.players.size(); ++j) {
        PlayerProfile prof = nash_strategies(a.alphas[j].values, c.players[j], c.env, c.grid);
        derived_profiles(prof, c.players[j], c.env, c.grid);
        a.player_profiles.push_back(std::move(prof));
    }
    a.nash = assemble_global(Regime::nash, a.player_profiles, c.partition, c.grid);
    a.nash_solver_n = solver_net_emissions(a.player_profiles, c.partition, c.grid);
    a.welfare_report =
        welfare(a.alphas, a.player_profiles, c.p0, c.players, c.env, c.partition, c.grid);

    for (const PlayerSpec& p : c.players) {
        a.zero_diff.push_back(zero_diffusion_benchmark(p, c.env, c.grid));
    }
    a.zero_diff_global = assemble_global(Regime::zero_diffusion, a.zero_diff, c.partition, c.grid);

    if (c.homogeneous_preferences()) {
        a.coop = cooperative_equilibrium(c.players, c.env, c.partition, c.grid, c.p0);
    }
    rep.timings_ms["equilibrium"] = stage.ms();

    stage.reset();
    a.steady = steady_state(a.nash_solver_n, c.env, c.grid);
    if (a.coop) {
        a.steady_coop =
            steady_state(solver_net_emissions(a.coop->per_player, c.partition, c.grid), c.env, c.grid);
    }
    rep.timings_ms["steady_state"] = stage.ms();

    for (std::size_t j = 0; j < c.players.size(); ++j) {
        PlayerReport pr;
        pr.index = c.players[j].index;
        pr.alpha_min = a.alphas[j].values.min();
        pr.alpha_max = a.alphas[j].values.max();
        pr.alpha_residual = a.alphas[j].residual;
        pr.q = a.welfare_report.players[j].q;
        pr.alpha_inner = a.welfare_report.players[j].alpha_inner;
        pr.v = a.welfare_report.players[j].v;
        const Arc& arc = c.partition.arcs[j];
        pr.i = stats_over_arc(a.player_profiles[j].i, arc, c.grid);
        pr.b = stats_over_arc(a.player_profiles[j].b, arc, c.grid);
        pr.n = stats_over_arc(a.player_profiles[j].n, arc, c.grid);
        pr.y = stats_over_arc(a.player_profiles[j].y, arc, c.grid);
        pr.c = stats_over_arc(a.player_profiles[j].c, arc, c.grid);
        rep.players.push_back(std::move(pr));
    }
    rep.has_cooperative = a.coop.has_value();
    if (a.coop) {
        rep.coop_residual = a.coop->residual;
        rep.coop_q = a.coop->q_bar;
        rep.coop_alpha_inner = a.coop->alpha_inner;
        rep.coop_v = a.coop->v_bar;
        rep.coop_alpha = stats_global(a.coop->alpha_bar);
    }
    rep.steady.p = stats_global(a.steady.p);
    rep.steady.residual = a.steady.residual;
    rep.steady.mass_balance_gap = mass_balance_gap(a.steady.p, a.nash_solver_n, c.env, c.grid);
    if (a.steady_coop) {
        SteadyReport sc;
        sc.p = stats_global(a.steady_coop->p);
        sc.residual = a.steady_coop->residual;
        sc.mass_balance_gap = mass_balance_gap(
            a.steady_coop->p, solver_net_emissions(a.coop->per_player, c.partition, c.grid), c.env,
            c.grid);
        rep.steady_coop = sc;
    }

    if (run_checks) {
        std::vector<CheckResult>& checks = rep.checks;
        for (std::size_t j = 0; j < c.players.size(); ++j) {
            const std::string suffix = "_player" + std::to_string(j + 1);
            checks.push_back({"alpha_residual" + suffix,
                              a.alphas[j].residual <= c.run.alpha_residual_tol,
                              a.alphas[j].residual, c.run.alpha_residual_tol});
            checks.push_back(
                {"alpha_positive" + suffix, rep.players[j].alpha_min > 0.0, rep.players[j].alpha_min, 0.0});
            const double excess = rep.players[j].alpha_max - a.alphas[j].upper_bound;
            checks.push_back({"alpha_upper_bound" + suffix, excess <= 1e-8, excess, 1e-8});
            checks.push_back({"admissible_consumption" + suffix, rep.players[j].c.min >= -1e-12,
                              rep.players[j].c.min, -1e-12});
            if (c.constant_coefficients()) {
                if (auto series = shifted_series(c, j)) {
                    double gap = 0.0;
                    for (int k = 0; k < c.grid.n_points; ++k) {
                        gap = std::max(gap, std::abs((*series)[k] - a.alphas[j].values[k]));
                    }
                    checks.push_back(
                        {"series_gap" + suffix, gap <= c.run.series_gap_tol, gap, c.run.series_gap_tol});
                }
            }
        }
        const double n_scale = std::max(1.0, a.nash_solver_n.sup_norm());
        checks.push_back({"steady_residual", a.steady.residual <= 1e-10 * n_scale, a.steady.residual,
                          1e-10 * n_scale});
        const double mb_scale = std::max(1.0, std::abs(circle_integral(a.nash_solver_n, c.grid)));
        checks.push_back({"mass_balance", rep.steady.mass_balance_gap <= 1e-10 * mb_scale,
                          rep.steady.mass_balance_gap, 1e-10 * mb_scale});

        bool finite = a.nash.i.all_finite() && a.nash.b.all_finite() && a.nash.n.all_finite() &&
                      a.nash.y.all_finite() && a.nash.c.all_finite() && a.steady.p.all_finite();
        for (const AlphaProfile& al : a.alphas) finite = finite && al.values.all_finite();
        checks.push_back({"finite_outputs", finite, finite ? 1.0 : 0.0, 1.0});

        append_declared_checks(c, a, checks);

        a.checks_passed = std::all_of(checks.begin(), checks.end(),
                                      [](const CheckResult& r) { return r.pass; });
    }
    rep.timings_ms["total"] = total.ms();
    return a;
}

// ------------------------------ output writers ------------------------------

namespace {

std::ofstream open_out(const std::string& out_dir, const std::string& filename) {
    std::filesystem::create_directories(out_dir);
    const std::string path = out_dir + "/" + filename;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ScenarioError({"cannot write output file: " + path});
    return out;
}

}  // namespace

void write_solve_outputs(const SolveArtifacts& a, const ScenarioConfig& c,
                         const std::string& out_dir) {
    std::ofstream csv = open_out(out_dir, "profiles.csv");
    csv << "x";
    for (const PlayerSpec& p : c.players) csv << ",alpha_" << p.index;
    csv << ",i_star,b_star,n_star,y_star,c_star,p_inf";
    if (a.coop) csv << ",alpha_coop,i_coop,b_coop,n_coop,y_coop,c_coop,p_inf_coop";
    csv << ",i_zero_diff,b_zero_diff,n_zero_diff\n";
    for (int k = 0; k < c.grid.n_points; ++k) {
        csv << fmt(c.grid.node(k));
        for (const AlphaProfile& al : a.alphas) csv << ',' << fmt(al.values[k]);
        csv << ',' << fmt(a.nash.i[k]) << ',' << fmt(a.nash.b[k]) << ',' << fmt(a.nash.n[k]) << ','
            << fmt(a.nash.y[k]) << ',' << fmt(a.nash.c[k]) << ',' << fmt(a.steady.p[k]);
        if (a.coop) {
            csv << ',' << fmt(a.coop->alpha_bar[k]) << ',' << fmt(a.coop->profile.i[k]) << ','
                << fmt(a.coop->profile.b[k]) << ',' << fmt(a.coop->profile.n[k]) << ','
                << fmt(a.coop->profile.y[k]) << ',' << fmt(a.coop->profile.c[k]) << ','
                << fmt((*a.steady_coop).p[k]);
        }
        csv << ',' << fmt(a.zero_diff_global.i[k]) << ',' << fmt(a.zero_diff_global.b[k]) << ','
            << fmt(a.zero_diff_global.n[k]) << '\n';
    }
    csv.close();

    std::ofstream rj = open_out(out_dir, "report.json");
    rj << run_report_to_json(a.report);
}

SimulateArtifacts simulate_scenario(const ScenarioConfig& c) {
    SolveArtifacts solved = solve_scenario(c, false);
    SimulateArtifacts out;
    out.p_inf = solved.steady.p;
    out.traj = simulate(c.p0, solved.nash_solver_n, c.env, c.grid, c.run.T, c.run.dt,
                        c.run.n_samples, &*out.p_inf);
    return out;
}

void write_trajectory_outputs(const SimulateArtifacts& a, const ScenarioConfig& c,
                              const std::string& out_dir) {
    std::ofstream csv = open_out(out_dir, "trajectory.csv");
    csv << "t,x,p\n";
    for (std::size_t s = 0; s < a.traj.times.size(); ++s) {
        for (int k = 0; k < c.grid.n_points; ++k) {
            csv << fmt(a.traj.times[s]) << ',' << fmt(c.grid.node(k)) << ','
                << fmt(a.traj.states[s][k]) << '\n';
        }
    }
    csv.close();

    std::ofstream sum = open_out(out_dir, "trajectory_summary.csv");
    const bool with_gap = !a.traj.gap.empty();
    sum << (with_gap ? "t,mass,gap\n" : "t,mass\n");
    for (std::size_t s = 0; s < a.traj.times.size(); ++s) {
        sum << fmt(a.traj.times[s]) << ',' << fmt(a.traj.mass[s]);
        if (with_gap) sum << ',' << fmt(a.traj.gap[s]);
        sum << '\n';
    }
}

void run_sweep(const ScenarioConfig& base, const std::string& parameter,
               const std::vector<double>& values, const std::string& out_dir) {
    if (values.empty()) {
        throw std::invalid_argument("sweep: empty value list");
    }
    (void)apply_parameter(base, parameter, values.front());  // reject bad names before writing
    std::ofstream csv = open_out(out_dir, "sweep.csv");
    csv << "parameter,param_value,x,variable,value\n";
    auto emit = [&](double value, const std::string& variable, const SpatialField& f) {
        for (int k = 0; k < base.grid.n_points; ++k) {
            csv << parameter << ',' << fmt(value) << ',' << fmt(base.grid.node(k)) << ',' << variable
                << ',' << fmt(f[k]) << '\n';
        }
    };
    for (double value : values) {
        ScenarioConfig c = apply_parameter(base, parameter, value);
        std::vector<AlphaProfile> alphas;
        std::vector<PlayerProfile> profiles;
        std::vector<PlayerProfile> lim0, liminf;
        for (const PlayerSpec& p : c.players) {
            alphas.push_back(alpha_profile(p, c.env, c.grid));
            PlayerProfile prof = nash_strategies(alphas.back().values, p, c.env, c.grid);
            derived_profiles(prof, p, c.env, c.grid);
            profiles.push_back(std::move(prof));
            lim0.push_back(zero_diffusion_benchmark(p, c.env, c.grid));
            liminf.push_back(infinite_diffusion_benchmark(p, c.env, c.grid));
        }
        EquilibriumProfile nash = assemble_global(Regime::nash, profiles, c.partition, c.grid);
        EquilibriumProfile zl = assemble_global(Regime::zero_diffusion, lim0, c.partition, c.grid);
        EquilibriumProfile il = assemble_global(Regime::sigma_limit, liminf, c.partition, c.grid);
        for (std::size_t j = 0; j < c.players.size(); ++j) {
            emit(value, "alpha_" + std::to_string(j + 1), alphas[j].values);
        }
        emit(value, "i_star", nash.i);
        emit(value, "b_star", nash.b);
        emit(value, "n_star", nash.n);
        emit(value, "i_limit_sigma_zero", zl.i);
        emit(value, "i_limit_sigma_infty", il.i);
    }
}

FragmentationReport run_fragment(const ScenarioConfig& fine, const ScenarioConfig& coarse,
                                 double T, const std::string& out_dir) {
    Issues issues;
    if (fine.grid.n_points != coarse.grid.n_points) {
        issues.add("fragment: the two scenarios use different grids");
    }
    if (fine.env.sigma != coarse.env.sigma || fine.env.eta != coarse.env.eta ||
        fine.env.theta != coarse.env.theta) {
        issues.add("fragment: environment parameters differ between the scenarios");
    }
    auto const_value = [&issues](const PiecewiseSpec& s, const std::string& what) {
        if (!s.is_constant()) issues.add("fragment: " + what + " must be space-homogeneous");
        return s.fallback;
    };
    const double delta_f = const_value(fine.delta_spec, "delta");
    const double delta_c = const_value(coarse.delta_spec, "delta");
    const double v_f = const_value(fine.v_spec, "v");
    const double v_c = const_value(coarse.v_spec, "v");
    if (delta_f != delta_c || v_f != v_c) {
        issues.add("fragment: delta/v differ between the scenarios");
    }

    SharedParams shared;
    auto check_players = [&](const ScenarioConfig& c, const char* tag) {
        for (std::size_t j = 0; j < c.players.size(); ++j) {
            const PlayerSpec& p = c.players[j];
            if (!c.w_specs[j].is_constant() || !c.A_specs[j].is_constant()) {
                issues.add(std::string("fragment: ") + tag + " players[" + std::to_string(j + 1) +
                           "]: w and A must be space-homogeneous");
                continue;
            }
            if (j == 0 && tag == std::string("fine")) {
                shared.rho = p.rho;
                shared.gamma = p.gamma;
                shared.w = c.w_specs[j].fallback;
                shared.A = c.A_specs[j].fallback;
            } else if (p.rho != shared.rho || p.gamma != shared.gamma ||
                       c.w_specs[j].fallback != shared.w || c.A_specs[j].fallback != shared.A) {
                issues.add(std::string("fragment: ") + tag + " players[" + std::to_string(j + 1) +
                           "]: parameters differ from the shared homogeneous set");
            }
        }
    };
    check_players(fine, "fine");
    check_players(coarse, "coarse");
    for (int k = 0; k < fine.grid.n_points && !issues.any(); ++k) {
        if (fine.p0[k] != coarse.p0[k]) {
            issues.add("fragment: initial pollution differs between the scenarios");
        }
    }
    if (!is_refinement(fine.partition, coarse.partition)) {
        issues.add("fragment: the first configuration is not a refinement of the second");
    }
    issues.raise_if_any();

    FragmentationReport rep = fragmentation_order_check(
        fine.partition, coarse.partition, shared, fine.env, fine.grid, fine.p0, T, fine.run.dt,
        fine.run.n_samples, fine.run.ordering_slack);

    std::ofstream csv = open_out(out_dir, "fragment_gap.csv");
    csv << "t,min_gap\n";
    for (std::size_t s = 0; s < rep.times.size(); ++s) {
        csv << fmt(rep.times[s]) << ',' << fmt(rep.min_gap_at_time[s]) << '\n';
    }
    csv.close();

    std::ofstream rj = open_out(out_dir, "fragment_report.json");
    ordered_json j{{"min_gap_trajectory", rep.min_gap_trajectory},
                   {"min_gap_steady", rep.min_gap_steady},
                   {"slack", rep.slack},
                   {"pass", rep.pass}};
    rj << j.dump(2) << "\n";
    return rep;
}

}  // namespace circlegame
