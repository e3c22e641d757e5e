#pragma once

#include <string>

#include "circlegame/domain.hpp"

namespace helpers {

using namespace circlegame;

inline EnvironmentSpec make_env(const CircleGrid& g, double sigma, double delta, double v = 0.0,
                                double eta = 0.2, double theta = 0.4) {
    EnvironmentSpec env;
    env.sigma = sigma;
    env.delta = SpatialField(g.n_points, delta);
    env.v = SpatialField(g.n_points, v);
    env.eta = eta;
    env.theta = theta;
    return env;
}

inline PlayerSpec make_player(int index, Arc arc, const CircleGrid& g, double rho = 0.03,
                              double gamma = 0.5, double w = 1.0, double A = 1.6) {
    PlayerSpec p;
    p.index = index;
    p.arc = arc;
    p.rho = rho;
    p.gamma = gamma;
    p.w = SpatialField(g.n_points, w);
    p.A = SpatialField(g.n_points, A);
    return p;
}

inline std::string scenario_path(const char* file) {
    return std::string(CIRCLEGAME_SCENARIO_DIR) + "/" + file;
}

}  // namespace helpers
