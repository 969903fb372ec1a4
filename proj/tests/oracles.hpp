#pragma once

// Reference computations for the tests. They share no code with the library:
// plain long-double arithmetic, direct sums, Rolle brackets, Simpson's rule.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace oracle {

using real = long double;

inline real horner(const std::vector<real>& c, real x) {
    real acc = 0.0L;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

inline std::vector<real> differentiate(const std::vector<real>& c) {
    std::vector<real> d;
    for (std::size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * static_cast<real>(i));
    return d;
}

inline int sgn(real v) { return (v > 0) - (v < 0); }

// Distinct real roots of c in [a, b]. Between consecutive critical points the
// polynomial is monotone, so each sign change is exactly one root; a zero at a
// bracket point is one root as well.
inline std::vector<real> roots_in(std::vector<real> c, real a, real b) {
    while (c.size() > 1 && c.back() == 0.0L) c.pop_back();
    if (c.size() <= 1) return {};
    std::vector<real> breaks{a};
    if (c.size() > 2) {
        for (real r : roots_in(differentiate(c), a, b)) {
            if (r > a && r < b) breaks.push_back(r);
        }
    }
    breaks.push_back(b);
    std::vector<real> out;
    auto push = [&](real r) {
        if (out.empty() || r - out.back() > 1e-15L * std::max<real>(1.0L, std::fabs(r))) out.push_back(r);
    };
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        real lo = breaks[k], hi = breaks[k + 1];
        const int s_lo = sgn(horner(c, lo));
        const int s_hi = sgn(horner(c, hi));
        if (s_lo == 0) push(lo);
        if (s_lo != 0 && s_hi != 0 && s_lo != s_hi) {
            for (int it = 0; it < 200 && hi - lo > 0; ++it) {
                const real mid = (lo + hi) / 2;
                if (mid <= lo || mid >= hi) break;
                const int s_mid = sgn(horner(c, mid));
                if (s_mid == 0) {
                    lo = hi = mid;
                    break;
                }
                (s_mid == s_lo ? lo : hi) = mid;
            }
            push((lo + hi) / 2);
        }
        if (k + 2 == breaks.size() && s_hi == 0) push(hi);
    }
    return out;
}

inline int count_roots(const std::vector<double>& coeffs, double a, double b) {
    std::vector<real> c(coeffs.begin(), coeffs.end());
    return static_cast<int>(roots_in(c, a, b).size());
}

// Edelman-Kostlan density from the moments A = E f^2, B = E f f', C = E f'^2.
inline real density(int n, real x) {
    real a = 0, b = 0, c = 0;
    real pw = 1;  // x^{2i-2}
    for (int i = 0; i <= n; ++i) {
        const real x2i = (i == 0) ? 1.0L : pw * x * x;
        a += x2i;
        if (i >= 1) {
            b += i * pw * x;
            c += static_cast<real>(i) * i * pw;
        }
        if (i >= 1) pw *= x * x;
    }
    const real disc = std::max<real>(a * c - b * b, 0.0L);
    return std::sqrt(disc) / (std::numbers::pi_v<real> * a);
}

template <class F>
real simpson(F f, real lo, real hi, int panels) {
    if (panels % 2) ++panels;
    const real h = (hi - lo) / panels;
    real sum = f(lo) + f(hi);
    for (int k = 1; k < panels; ++k) sum += f(lo + k * h) * ((k % 2) ? 4.0L : 2.0L);
    return sum * h / 3;
}

// Expected number of roots in [a, b] with 0 <= a < b <= 1, integrated in
// s = -log(1 - x) so the boundary layer at 1 is resolved.
inline real expected_count(int n, real a, real b) {
    const real s_lo = -std::log1p(-a);
    const real s_hi = (b >= 1.0L) ? 45.0L : -std::log1p(-b);
    auto integrand = [&](real s) {
        const real w = std::exp(-s);
        return density(n, 1.0L - w) * w;
    };
    return simpson(integrand, s_lo, s_hi, 60000);
}

// Exact normalized covariance of f_n at x and y by direct sums.
inline real covariance(int n, real x, real y) {
    real xy = 0, xx = 0, yy = 0, px = 1, py = 1;
    for (int i = 0; i <= n; ++i) {
        xy += px * py;
        xx += px * px;
        yy += py * py;
        px *= x;
        py *= y;
    }
    return xy / std::sqrt(xx * yy);
}

inline real sech_half(real d) { return 1.0L / std::cosh(d / 2); }

}  // namespace oracle
