#pragma once

// Independent high-precision evaluations of the closed-form scalars used as
// test oracles. Everything here is computed in long double straight from the
// strategy formulas, never through the library code under test.

#include <cmath>

namespace oracles {

inline long double depollution(long double A, long double eta, long double theta) {
    return powl((A - 1.0L) * eta * theta, 1.0L / (1.0L - theta));
}

inline long double investment(long double alpha, long double A, long double gamma, long double eta,
                              long double theta) {
    return powl(alpha, -1.0L / gamma) * powl(A - 1.0L, (1.0L - gamma) / gamma) +
           powl(eta * theta, 1.0L / (1.0L - theta)) * powl(A - 1.0L, theta / (1.0L - theta));
}

inline long double investment_zero_diffusion(long double w, long double rho, long double delta,
                                             long double A, long double gamma, long double eta,
                                             long double theta) {
    return investment(w / (rho + delta), A, gamma, eta, theta);
}

inline long double net_emission(long double i, long double b, long double eta, long double theta) {
    return i - eta * powl(b, theta);
}

// Baseline two-region parameter set: A=1.6, rho=0.03, sigma=0.5, delta=0.2,
// w=1, gamma=0.5, eta=0.2, theta=0.4. Frozen from 40-digit evaluations of the
// formulas above.
inline constexpr double kBaseBStar = 0.006339700317877683;          // [(A-1) eta theta]^{1/(1-theta)}
inline constexpr double kBaseIZeroDiff = 0.042306167196462805;      // sigma=0 investment
inline constexpr double kBaseISecondTerm = 0.010566167196462805;    // depollution-driven term of i
inline constexpr double kBaseNZeroDiff = 0.015890749205305792;      // sigma=0 net emission
inline constexpr double kBaseIInf = 0.13752616719646281;            // sigma->inf investment
inline constexpr double kBaseAlphaZero = 4.3478260869565217;        // w/(rho+delta)
inline constexpr double kBaseAlphaInf = 2.1739130434782609;         // half-circle sigma->inf constant
inline constexpr double kBaseSeriesMean = 2.1739130434782609;       // ell*w/(2*pi*(rho+delta)), ell=pi

}  // namespace oracles
