#include "kaclab/root_count.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "exact_descartes.hpp"
#include "kaclab/errors.hpp"

namespace kaclab {

int RootCountResult::upper_bound() const noexcept {
    int total = certified_count;
    for (const auto& cell : uncertain_cells) total += cell.capacity;
    return total;
}

namespace {

constexpr double unit_roundoff = std::numeric_limits<double>::epsilon() / 2.0;

// Taylor order of the cell enclosures; the remainder uses derivative order + 1.
constexpr int taylor_order = 3;

// gamma_k = k u / (1 - k u), inflated slightly to absorb the rounding of the
// bound itself.
double gamma_bound(std::size_t k) {
    const double ku = static_cast<double>(k) * unit_roundoff;
    return ku / (1.0 - ku) * (1.0 + 1e-6);
}

// Rigorous floating-point machinery for one polynomial: certified point signs
// and Taylor-model enclosures of f and f' over a cell.
class FilteredEvaluator {
public:
    explicit FilteredEvaluator(std::span<const double> coeffs) : coeffs_(coeffs.begin(), coeffs.end()) {
        const std::size_t n = coeffs_.size() - 1;
        for (int k = 0; k <= taylor_order + 1; ++k) {
            auto& d = scaled_[static_cast<std::size_t>(k)];
            auto& ad = abs_scaled_[static_cast<std::size_t>(k)];
            d.assign(n + 1, 0.0);
            ad.assign(n + 1, 0.0);
            for (std::size_t i = static_cast<std::size_t>(k); i <= n; ++i) {
                // binomial(i, k) exactly for the degrees used here
                double binom = 1.0;
                for (int j = 0; j < k; ++j) binom = binom * static_cast<double>(i - static_cast<std::size_t>(j)) / (j + 1);
                d[i] = coeffs_[i] * binom;
                ad[i] = std::fabs(d[i]);
            }
        }
        error_factor_ = gamma_bound(2 * n + 8);
        sum_factor_ = 1.0 / (1.0 - gamma_bound(2 * n + 2));
    }

    std::size_t degree() const noexcept { return coeffs_.size() - 1; }

    int sign_at(double x) const {
        const std::size_t n = degree();
        double value = coeffs_[n];
        double magnitude = std::fabs(coeffs_[n]);
        const double ax = std::fabs(x);
        for (std::size_t i = n; i-- > 0;) {
            value = value * x + coeffs_[i];
            magnitude = magnitude * ax + std::fabs(coeffs_[i]);
        }
        const double err = error_factor_ * magnitude * sum_factor_;
        if (std::isfinite(value) && std::isfinite(err) && std::fabs(value) > err) return value > 0 ? 1 : -1;
        return detail::exact_sign(coeffs_, x);
    }

    struct Enclosure {
        bool no_root = false;
        bool monotone = false;
    };

    Enclosure enclose(double a, double b) const {
        const std::size_t n = degree();
        const double mid = a + (b - a) / 2.0;
        const double radius = std::max(mid - a, b - mid) * (1.0 + 4.0 * unit_roundoff);
        const double reach = std::max(std::fabs(a), std::fabs(b));
        const double am = std::fabs(mid);

        std::array<double, taylor_order + 1> t{};
        std::array<double, taylor_order + 1> s{};
        for (int k = 0; k <= taylor_order; ++k) {
            const auto& d = scaled_[static_cast<std::size_t>(k)];
            const auto& ad = abs_scaled_[static_cast<std::size_t>(k)];
            double value = d[n];
            double mag = ad[n];
            for (std::size_t i = n; i-- > static_cast<std::size_t>(k);) {
                value = value * mid + d[i];
                mag = mag * am + ad[i];
            }
            t[static_cast<std::size_t>(k)] = value;
            s[static_cast<std::size_t>(k)] = mag;
        }
        const auto& tail_coeffs = abs_scaled_[taylor_order + 1];
        double tail = tail_coeffs[n];
        for (std::size_t i = n; i-- > static_cast<std::size_t>(taylor_order + 1);) tail = tail * reach + tail_coeffs[i];
        tail *= sum_factor_ * (1.0 + 4.0 * unit_roundoff);

        Enclosure out;
        std::array<double, taylor_order + 1> hi{};
        for (int k = 0; k <= taylor_order; ++k) {
            const double err = error_factor_ * s[static_cast<std::size_t>(k)] * sum_factor_;
            hi[static_cast<std::size_t>(k)] = std::fabs(t[static_cast<std::size_t>(k)]) + err;
            if (!std::isfinite(hi[static_cast<std::size_t>(k)])) return out;
        }
        if (!std::isfinite(tail)) return out;
        const double slack = 1.0 + 64.0 * unit_roundoff;

        // |f(mid + h)| >= |T0| - sum_{k>=1} |T_k| r^k - B r^(K+1)
        {
            const double low = std::fabs(t[0]) - error_factor_ * s[0] * sum_factor_;
            double rest = 0.0, rp = 1.0;
            for (int k = 1; k <= taylor_order; ++k) {
                rp *= radius;
                rest += hi[static_cast<std::size_t>(k)] * rp;
            }
            rest += tail * rp * radius;
            out.no_root = low > rest * slack;
        }
        if (out.no_root) return out;
        // |f'(mid + h)| >= |T1| - sum_{k>=2} k |T_k| r^(k-1) - (K+1) B r^K
        {
            const double low = std::fabs(t[1]) - error_factor_ * s[1] * sum_factor_;
            double rest = 0.0, rp = 1.0;
            for (int k = 2; k <= taylor_order; ++k) {
                rp *= radius;
                rest += k * hi[static_cast<std::size_t>(k)] * rp;
            }
            rest += (taylor_order + 1) * tail * rp * radius;
            out.monotone = low > rest * slack;
        }
        return out;
    }

    std::span<const double> coefficients() const noexcept { return coeffs_; }

private:
    std::vector<double> coeffs_;
    std::array<std::vector<double>, taylor_order + 2> scaled_;
    std::array<std::vector<double>, taylor_order + 2> abs_scaled_;
    double error_factor_ = 0.0;
    double sum_factor_ = 1.0;
};

struct Cell {
    double a, b;
    int sa, sb;
    int depth;
};

void append_exact(RootCountResult& result, const detail::ExactCount& exact) {
    result.certified_count += exact.count;
    result.isolating_cells.insert(result.isolating_cells.end(), exact.isolating.begin(), exact.isolating.end());
    result.uncertain_cells.insert(result.uncertain_cells.end(), exact.uncertain.begin(), exact.uncertain.end());
}

// Roots in the open interval (lo, hi) given certified endpoint signs.
void count_open_filtered(const FilteredEvaluator& eval, double lo, double hi, int sign_lo, int sign_hi,
                         const CountOptions& options, RootCountResult& result) {
    const int n = static_cast<int>(eval.degree());
    std::vector<Cell> stack{{lo, hi, sign_lo, sign_hi, 0}};
    auto unresolved = [&](const Cell& c) {
        if (n <= options.exact_fallback_degree) {
            append_exact(result, detail::exact_count_open(eval.coefficients(), c.a, c.b, options.depth_budget,
                                                          n <= options.square_free_degree_limit));
        } else {
            result.uncertain_cells.push_back(RootCell{c.a, c.b, n});
        }
    };
    while (!stack.empty()) {
        const Cell c = stack.back();
        stack.pop_back();
        const auto enc = eval.enclose(c.a, c.b);
        if (enc.no_root) continue;
        if (enc.monotone) {
            if (c.sa * c.sb < 0) {
                ++result.certified_count;
                result.isolating_cells.push_back(RootCell{c.a, c.b, 1});
            }
            continue;
        }
        const double mid = c.a + (c.b - c.a) / 2.0;
        if (c.depth >= options.depth_budget || !(mid > c.a && mid < c.b)) {
            unresolved(c);
            continue;
        }
        const int sm = eval.sign_at(mid);
        if (sm == 0) {
            ++result.certified_count;
            result.isolating_cells.push_back(RootCell{mid, mid, 1});
        }
        stack.push_back(Cell{mid, c.b, sm, c.sb, c.depth + 1});
        stack.push_back(Cell{c.a, mid, c.sa, sm, c.depth + 1});
    }
}

void validate_interval(const CountInterval& interval) {
    if (!std::isfinite(interval.lo) || !std::isfinite(interval.hi)) {
        throw ParameterError("root counting interval must be finite");
    }
    if (interval.lo > interval.hi) throw ParameterError("root counting interval needs lo <= hi");
}

}  // namespace

int certified_sign(const KacPolynomial& p, double x) {
    const auto c = p.coefficients();
    const double v = evaluate(p, x);
    double magnitude = 0.0;
    const double ax = std::fabs(x);
    for (std::size_t i = c.size(); i-- > 0;) magnitude = magnitude * ax + std::fabs(c[i]);
    // compensated Horner: |error| <= u|v| + gamma_{2n}^2 sum |c_i||x|^i
    const double g = gamma_bound(2 * c.size() + 2);
    const double err = unit_roundoff * std::fabs(v) * 2.0 + g * g * magnitude * 2.0;
    if (std::isfinite(v) && std::isfinite(err) && std::fabs(v) > err) return v > 0 ? 1 : -1;
    return detail::exact_sign(c, x);
}

RootCountResult count_certified(const KacPolynomial& p, const CountInterval& interval, const CountOptions& options) {
    validate_interval(interval);
    if (options.depth_budget < 0) throw ParameterError("depth budget must be non-negative");
    if (p.is_zero()) throw ParameterError("the zero polynomial vanishes on the whole interval");
    RootCountResult result;
    result.method = CountMethod::certified;

    // effective degree without leading zeros
    auto coeffs = p.coefficients();
    std::size_t len = coeffs.size();
    while (len > 1 && coeffs[len - 1] == 0.0) --len;
    const std::span<const double> trimmed = coeffs.first(len);
    const KacPolynomial poly(std::vector<double>(trimmed.begin(), trimmed.end()));
    const int n = poly.degree();

    const int sign_lo = certified_sign(poly, interval.lo);
    const int sign_hi = certified_sign(poly, interval.hi);
    if (interval.lo == interval.hi) {
        if (sign_lo == 0 && interval.lo_closed && interval.hi_closed) {
            result.certified_count = 1;
            result.isolating_cells.push_back(RootCell{interval.lo, interval.lo, 1});
        }
        return result;
    }
    if (sign_lo == 0 && interval.lo_closed) {
        ++result.certified_count;
        result.isolating_cells.push_back(RootCell{interval.lo, interval.lo, 1});
    }
    if (n >= 1) {
        bool use_exact = options.engine == CountEngine::exact ||
                         (options.engine == CountEngine::automatic && n <= options.exact_degree_limit);
        if (use_exact) {
            append_exact(result, detail::exact_count_open(trimmed, interval.lo, interval.hi, options.depth_budget,
                                                          n <= options.square_free_degree_limit ||
                                                              options.engine == CountEngine::exact));
        } else {
            FilteredEvaluator eval(trimmed);
            count_open_filtered(eval, interval.lo, interval.hi, sign_lo, sign_hi, options, result);
        }
    }
    if (sign_hi == 0 && interval.hi_closed) {
        ++result.certified_count;
        result.isolating_cells.push_back(RootCell{interval.hi, interval.hi, 1});
    }
    auto by_position = [](const RootCell& l, const RootCell& r) { return l.lo < r.lo || (l.lo == r.lo && l.hi < r.hi); };
    std::sort(result.isolating_cells.begin(), result.isolating_cells.end(), by_position);
    std::sort(result.uncertain_cells.begin(), result.uncertain_cells.end(), by_position);
    return result;
}

RootCountResult count_certified(const KacPolynomial& p, double lo, double hi, int depth_budget) {
    CountOptions options;
    options.depth_budget = depth_budget;
    return count_certified(p, CountInterval::closed(lo, hi), options);
}

double refine_root(const KacPolynomial& p, RootCell cell, double tolerance) {
    if (cell.lo == cell.hi) return cell.lo;
    // An endpoint may be a neighbouring exact root; the sign just inside the
    // cell is the one that brackets the interior root.
    const double inner_lo = std::nextafter(cell.lo, cell.hi);
    const double inner_hi = std::nextafter(cell.hi, cell.lo);
    int sa = certified_sign(p, cell.lo);
    if (sa == 0) sa = certified_sign(p, inner_lo);
    if (sa == 0) return inner_lo;
    int sb = certified_sign(p, cell.hi);
    if (sb == 0) sb = certified_sign(p, inner_hi);
    if (sb == 0) return inner_hi;
    if (sa == sb) return cell.lo + (cell.hi - cell.lo) / 2.0;
    double a = cell.lo, b = cell.hi;
    while (b - a > tolerance) {
        const double mid = a + (b - a) / 2.0;
        if (!(mid > a && mid < b)) break;
        const int sm = certified_sign(p, mid);
        if (sm == 0) return mid;
        if (sm == sa) {
            a = mid;
        } else {
            b = mid;
        }
    }
    return a + (b - a) / 2.0;
}

std::vector<double> isolate_roots(const KacPolynomial& p, const CountInterval& interval, double tolerance,
                                  const CountOptions& options) {
    const auto result = count_certified(p, interval, options);
    std::vector<double> roots;
    roots.reserve(result.isolating_cells.size());
    for (const auto& cell : result.isolating_cells) roots.push_back(refine_root(p, cell, tolerance));
    return roots;
}

PartitionSpec make_partition(int n, double m, double ell, double delta) {
    if (n < 1) throw ParameterError("partition needs degree >= 1");
    if (!(m > 1.0) || !(ell > 0.0)) throw ParameterError("partition needs m > 1 and ell > 0");
    if (!(m <= n / ell)) throw ParameterError("bulk interval [1-1/m, 1-ell/n] is empty (need m <= n/ell)");
    if (!(delta > 0.0)) delta = std::pow(m, -1.0 / 6.0);
    PartitionSpec spec;
    spec.n = n;
    spec.m = m;
    spec.ell = ell;
    spec.delta = delta;
    const double s_begin = std::log(m);
    const double s_end = std::log(static_cast<double>(n) / ell);
    const auto steps = static_cast<std::size_t>(std::floor((s_end - s_begin) / delta * (1.0 + 1e-12)));
    for (std::size_t k = 0; k <= steps; ++k) {
        const double s = s_begin + static_cast<double>(k) * delta;
        spec.s.push_back(s);
        spec.x.push_back(-std::expm1(-s));
    }
    return spec;
}

int count_sign_changes(std::span<const double> values) {
    int changes = 0;
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
        if ((values[k] < 0.0 && values[k + 1] > 0.0) || (values[k] > 0.0 && values[k + 1] < 0.0)) ++changes;
    }
    return changes;
}

int count_grid_sign_changes(const KacPolynomial& p, std::span<const double> points) {
    int changes = 0;
    int previous = 0;
    for (std::size_t k = 0; k < points.size(); ++k) {
        const int s = certified_sign(p, points[k]);
        if (k > 0 && s * previous < 0) ++changes;
        previous = s;
    }
    return changes;
}

int count_grid_sign_changes(const KacPolynomial& p, const PartitionSpec& spec) {
    return count_grid_sign_changes(p, spec.x);
}

namespace {

std::complex<double> evaluate_complex(std::span<const double> c, std::complex<double> w) {
    std::complex<double> acc = c.back();
    for (std::size_t i = c.size() - 1; i-- > 0;) acc = acc * w + c[i];
    return acc;
}

// Sampled maximum of |p| on the circle, doubling the angle count until it
// settles. Also returns the angle count used.
std::pair<double, int> circle_max(std::span<const double> c, double center, double radius,
                                  const JensenOptions& options) {
    int angles = std::max(options.initial_angles, 4);
    auto sample = [&](int count, int stride_start, int stride) {
        double best = 0.0;
        for (int k = stride_start; k < count; k += stride) {
            const double theta = 2.0 * std::numbers::pi * k / count;
            best = std::max(best, std::abs(evaluate_complex(c, center + radius * std::polar(1.0, theta))));
        }
        return best;
    };
    double best = sample(angles, 0, 1);
    while (angles < options.max_angles) {
        // new points are the odd multiples of the finer spacing
        const double refined = std::max(best, sample(angles * 2, 1, 2));
        angles *= 2;
        const bool settled = refined - best <= options.relative_tolerance * refined;
        best = refined;
        if (settled) break;
    }
    return {best, angles};
}

}  // namespace

double jensen_root_bound(const KacPolynomial& p, double center, double r, double big_r, const JensenOptions& options) {
    if (!(r > 0.0) || !(big_r > r)) throw ParameterError("jensen bound needs 0 < r < R");
    if (p.is_zero()) throw NumericError("jensen bound is undefined for a polynomial vanishing on the disk");
    const auto c = p.coefficients();
    auto [inner, inner_angles] = circle_max(c, center, r, options);
    auto [outer, outer_angles] = circle_max(c, center, big_r, options);
    // Upper bracket: between samples the modulus can exceed the sampled
    // maximum by at most max|p'| times half the arc spacing.
    const double reach = std::fabs(center) + big_r;
    double lipschitz = 0.0;
    for (std::size_t i = c.size(); i-- > 1;) lipschitz = lipschitz * reach + static_cast<double>(i) * std::fabs(c[i]);
    const double half_arc = std::numbers::pi * big_r / outer_angles;
    const double outer_upper = outer + lipschitz * half_arc;
    if (!(inner > 0.0)) throw NumericError("jensen bound is undefined: p vanishes on the inner circle samples");
    const double ratio = std::log((big_r * big_r + r * r) / (2.0 * big_r * r));
    const double bound = (std::log(outer_upper) - std::log(inner)) / ratio;
    (void)inner_angles;
    return std::max(bound, 0.0);
}

std::vector<std::size_t> lacunary_subsequence(std::span<const double> a, double threshold) {
    if (a.empty()) throw ParameterError("lacunary subsequence needs a nonempty sequence");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a[i] > 0.0)) throw ParameterError("lacunary subsequence needs strictly positive entries");
        if (i > 0 && a[i] > a[i - 1]) throw ParameterError("lacunary subsequence needs a nonincreasing sequence");
    }
    if (!(threshold > 0.0) || threshold > a[0]) {
        throw ParameterError("lacunary threshold must lie in (0, a_0]");
    }
    std::vector<std::size_t> out{0};
    std::size_t current = 0;
    std::size_t t = 1;
    while (a[current] >= threshold) {
        while (t < a.size() && a[current] < 2.0 * a[t]) ++t;
        if (t >= a.size()) break;
        current = t;
        out.push_back(current);
        ++t;
    }
    return out;
}

CountInterval region_interval(Region r) {
    switch (r) {
        case Region::unit_pos:
            return {0.0, 1.0, true, true};
        case Region::unit_neg:
            return {0.0, 1.0, false, true};
        case Region::outer_pos:
        case Region::outer_neg:
            return {0.0, 1.0, false, false};
    }
    return {};
}

RootCountResult count_region(const KacPolynomial& p, Region r, const CountOptions& options) {
    return count_certified(map_region(p, r), region_interval(r), options);
}

}  // namespace kaclab
