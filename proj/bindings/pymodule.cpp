#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "circlegame/scenario.hpp"

namespace py = pybind11;
using namespace circlegame;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
    py::array_t<double> out(py::array::ShapeContainer{static_cast<py::ssize_t>(v.size())});
    auto buf = out.mutable_unchecked<1>();
    for (py::ssize_t k = 0; k < buf.shape(0); ++k) {
        buf(k) = v[static_cast<std::size_t>(k)];
    }
    return out;
}

py::array_t<double> to_array(const SpatialField& f) { return to_array(f.values()); }

py::dict profile_dict(const EquilibriumProfile& p) {
    py::dict d;
    d["i"] = to_array(p.i);
    d["b"] = to_array(p.b);
    d["n"] = to_array(p.n);
    d["y"] = to_array(p.y);
    d["c"] = to_array(p.c);
    return d;
}

py::dict solve_path(const std::string& path, bool checks) {
    ScenarioConfig c = load_scenario(path);
    SolveArtifacts a = solve_scenario(c, checks);
    py::dict out;
    out["x"] = to_array(c.grid.nodes());
    py::list alphas, residuals;
    for (const AlphaProfile& al : a.alphas) {
        alphas.append(to_array(al.values));
        residuals.append(al.residual);
    }
    out["alpha"] = alphas;
    out["alpha_residual"] = residuals;
    out["nash"] = profile_dict(a.nash);
    out["p_inf"] = to_array(a.steady.p);
    out["zero_diffusion"] = profile_dict(a.zero_diff_global);
    if (a.coop) {
        py::dict coop = profile_dict(a.coop->profile);
        coop["alpha"] = to_array(a.coop->alpha_bar);
        coop["p_inf"] = to_array(a.steady_coop->p);
        coop["q"] = a.coop->q_bar;
        coop["v"] = a.coop->v_bar;
        out["cooperative"] = coop;
    } else {
        out["cooperative"] = py::none();
    }
    py::list welfare;
    for (const WelfareReport::Entry& e : a.welfare_report.players) {
        py::dict w;
        w["player"] = e.player_index;
        w["q"] = e.q;
        w["alpha_inner"] = e.alpha_inner;
        w["v"] = e.v;
        welfare.append(w);
    }
    out["welfare"] = welfare;
    out["report_json"] = run_report_to_json(a.report);
    out["checks_passed"] = a.checks_passed;
    return out;
}

py::dict simulate_path(const std::string& path, std::optional<double> T, std::optional<double> dt,
                       std::optional<int> n_samples) {
    ScenarioConfig c = load_scenario(path);
    if (T) c.run.T = *T;
    if (dt) c.run.dt = *dt;
    if (n_samples) c.run.n_samples = *n_samples;
    SimulateArtifacts a = simulate_scenario(c);
    py::dict out;
    out["t"] = to_array(a.traj.times);
    out["x"] = to_array(c.grid.nodes());
    py::array_t<double> p({static_cast<py::ssize_t>(a.traj.states.size()),
                           static_cast<py::ssize_t>(c.grid.n_points)});
    auto buf = p.mutable_unchecked<2>();
    for (py::ssize_t s = 0; s < buf.shape(0); ++s) {
        for (py::ssize_t k = 0; k < buf.shape(1); ++k) {
            buf(s, k) = a.traj.states[static_cast<std::size_t>(s)][static_cast<int>(k)];
        }
    }
    out["p"] = p;
    out["mass"] = to_array(a.traj.mass);
    out["gap"] = to_array(a.traj.gap);
    return out;
}

py::array_t<double> series_no_adv(double ell, double w0, double rho, double delta0, double sigma,
                                  int n_terms, int n_points) {
    CircleGrid g = CircleGrid::make(n_points);
    return to_array(alpha_series_no_advection(ell, w0, rho, delta0, sigma, n_terms, g));
}

py::array_t<double> series_adv(double ell, double w0, double rho, double delta0, double sigma,
                               double v0, int n_terms, int n_points) {
    CircleGrid g = CircleGrid::make(n_points);
    return to_array(alpha_series_advection(ell, w0, rho, delta0, sigma, v0, n_terms, g));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Closed-form equilibria of a transboundary-pollution game on the circle";

    m.def("grid_nodes",
          [](int n_points) { return to_array(CircleGrid::make(n_points).nodes()); },
          py::arg("n_points"), "Node coordinates of the periodic grid on [0, 2*pi).");

    m.def("solve", &solve_path, py::arg("scenario"), py::arg("checks") = true,
          "Solve a scenario file: per-player shadow-disutility profiles, Nash / cooperative / "
          "zero-diffusion strategies, welfare and the long-run pollution profile.");

    m.def("simulate", &simulate_path, py::arg("scenario"), py::arg("T") = py::none(),
          py::arg("dt") = py::none(), py::arg("n_samples") = py::none(),
          "Integrate the pollution dynamics under the Nash net emissions.");

    m.def("alpha_series", &series_no_adv, py::arg("ell"), py::arg("w0"), py::arg("rho"),
          py::arg("delta0"), py::arg("sigma"), py::arg("n_terms") = 64, py::arg("n_points") = 512,
          "Truncated Fourier solution of the resolvent equation, constant coefficients, no "
          "advection, support [0, ell).");

    m.def("alpha_series_advection", &series_adv, py::arg("ell"), py::arg("w0"), py::arg("rho"),
          py::arg("delta0"), py::arg("sigma"), py::arg("v0"), py::arg("n_terms") = 64,
          py::arg("n_points") = 512,
          "Truncated Fourier solution with a constant advection term.");

#ifdef CIRCLEGAME_VERSION
    m.attr("__version__") = CIRCLEGAME_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
