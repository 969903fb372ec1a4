#include "kaclab/kac_rice.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

#include "kaclab/errors.hpp"

namespace kaclab {

namespace {

constexpr double split_point = 0.9;
constexpr double absolute_tolerance = 1e-6;
constexpr unsigned max_depth = 13;  // 61-point rule: at most ~1e6 evaluations per piece

// phi(v) = 1/sinh(v)^2 - 1/v^2
double phi(double v) {
    if (v < 0.1) {
        const double w = v * v;
        return -1.0 / 3.0 +
               w * (1.0 / 15.0 +
                    w * (-2.0 / 189.0 +
                         w * (1.0 / 675.0 + w * (-2.0 / 10395.0 + w * (1382.0 / 58046625.0 + w * (-4.0 / 1403325.0))))));
    }
    const double sh = std::sinh(v);
    return 1.0 / (sh * sh) - 1.0 / (v * v);
}

// rho_1 at x = exp(-u), u >= 0.
double density_from_u(int n, double u) {
    const double big_n = static_cast<double>(n) + 1.0;
    const double radicand = 0.25 * std::exp(2.0 * u) * (phi(u) - big_n * big_n * phi(big_n * u));
    return std::sqrt(std::max(radicand, 0.0)) / std::numbers::pi;
}

double density_direct(int n, double x) {
    const double x2 = x * x;
    const double one_minus_x2 = 1.0 - x2;
    const double big_n = static_cast<double>(n) + 1.0;
    const double x2n = std::pow(x2, n);
    const double denom = 1.0 - x2n * x2;
    const double radicand = 1.0 / (one_minus_x2 * one_minus_x2) - big_n * big_n * x2n / (denom * denom);
    return std::sqrt(std::max(radicand, 0.0)) / std::numbers::pi;
}

void require_degree(int n) {
    if (n < 1) throw ParameterError("Kac-Rice density needs degree n >= 1");
}

template <class F>
double integrate_piece(F f, double a, double b, double& error_sum) {
    if (!(b > a)) return 0.0;
    double error = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, max_depth, 1e-12, &error);
    error_sum += error;
    return value;
}

}  // namespace

double density_rho1(int n, double x) {
    require_degree(n);
    if (!(std::fabs(x) <= 1.0)) throw DomainError("density_rho1 needs |x| <= 1");
    x = std::fabs(x);
    if (x < 0.5) return density_direct(n, x);
    return density_from_u(n, -std::log(x));
}

DensityProfile density_profile(int n, int points) {
    require_degree(n);
    if (points < 2) throw ParameterError("density profile needs at least 2 points");
    DensityProfile out;
    out.n = n;
    out.grid.resize(static_cast<std::size_t>(points));
    out.values.resize(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) {
        const double x = k == points - 1 ? 1.0 : static_cast<double>(k) / (points - 1);
        out.grid[static_cast<std::size_t>(k)] = x;
        out.values[static_cast<std::size_t>(k)] = density_rho1(n, x);
    }
    return out;
}

double expected_count(int n, double a, double b) {
    require_degree(n);
    if (!(a >= 0.0 && a <= b && b <= 1.0)) throw DomainError("expected_count needs 0 <= a <= b <= 1");
    if (a == b) return 0.0;
    double error = 0.0;
    double total = 0.0;

    total += integrate_piece([n](double x) { return density_rho1(n, x); }, a, std::min(b, split_point), error);

    if (b > split_point) {
        // x = 1 - e^{-s}; the density times dx/ds is flat for 1/n << 1 - x and
        // decays like e^{-s} beyond s = log n.
        const double s_a = -std::log1p(-std::max(a, split_point));
        const double s_b = b == 1.0 ? std::log(static_cast<double>(n) + 1.0) + 40.0 : -std::log1p(-b);
        auto in_s = [n](double s) {
            const double gap = std::exp(-s);
            const double u = -std::log1p(-gap);
            return density_from_u(n, u) * gap;
        };
        const double knee = std::log(static_cast<double>(n) + 1.0);
        if (s_a < knee && knee < s_b) {
            total += integrate_piece(in_s, s_a, knee, error);
            total += integrate_piece(in_s, knee, s_b, error);
        } else {
            total += integrate_piece(in_s, s_a, s_b, error);
        }
    }
    if (!(error <= absolute_tolerance) || !std::isfinite(total)) {
        throw QuadratureError("Kac-Rice quadrature missed the 1e-6 tolerance", total, error);
    }
    return total;
}

double expected_count_region(int n, Region) { return expected_count(n, 0.0, 1.0); }

double expected_count_real_line(int n) {
    double total = 0.0;
    for (Region r : all_regions) total += expected_count_region(n, r);
    return total;
}

}  // namespace kaclab
