#pragma once

#include <vector>

#include "kaclab/kac_poly.hpp"

namespace kaclab {

/// Density of real zeros of the Gaussian Kac polynomial on a grid.
struct DensityProfile {
    int n = 0;
    std::vector<double> grid;
    std::vector<double> values;
};

/// rho_1(x) = (1/pi) sqrt(1/(1-x^2)^2 - (n+1)^2 x^(2n) / (1-x^(2n+2))^2) for
/// |x| <= 1, using the even symmetry for negative x. Near x = 1 the radicand
/// is evaluated in the variable u = -log x in a form free of cancellation,
/// with the limit n(n+2)/12 at x = 1.
double density_rho1(int n, double x);

/// rho_1 at `points` equally spaced abscissae covering [0, 1].
DensityProfile density_profile(int n, int points);

/// Expected number of real zeros of the Gaussian Kac polynomial in [a, b]
/// with 0 <= a <= b <= 1, by adaptive Gauss-Kronrod quadrature to absolute
/// tolerance 1e-6. Above x = 0.9 the integral runs in s = -log(1 - x).
/// Throws QuadratureError (carrying the best estimate) if the tolerance is
/// not reached.
double expected_count(int n, double a, double b);

/// Expected count in one region; for Gaussian coefficients the region maps
/// preserve the law, so every region carries expected_count(n, 0, 1).
double expected_count_region(int n, Region r);

/// Sum over the four regions.
double expected_count_real_line(int n);

}  // namespace kaclab
