#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kaclab/kac_poly.hpp"

namespace kaclab {

/// Real interval with per-endpoint inclusion.
struct CountInterval {
    double lo = 0.0;
    double hi = 1.0;
    bool lo_closed = true;
    bool hi_closed = true;

    static CountInterval closed(double lo, double hi) { return {lo, hi, true, true}; }
    static CountInterval open(double lo, double hi) { return {lo, hi, false, false}; }
};

/// A subinterval [lo, hi]; lo == hi marks an exact root at a representable point.
struct RootCell {
    double lo = 0.0;
    double hi = 0.0;
    /// Upper bound on the number of distinct roots inside (uncertain cells only).
    int capacity = 1;
};

enum class CountMethod { certified, grid };

struct RootCountResult {
    int certified_count = 0;
    /// Cells where isolation did not finish inside the depth budget.
    std::vector<RootCell> uncertain_cells;
    CountMethod method = CountMethod::certified;
    /// Isolating cells of the certified roots, in increasing order.
    std::vector<RootCell> isolating_cells;

    bool fully_certified() const noexcept { return uncertain_cells.empty(); }
    /// certified_count plus the capacity of every uncertain cell.
    int upper_bound() const noexcept;
};

enum class CountEngine {
    /// Exact Descartes bisection for low degree, filtered bisection above.
    automatic,
    /// Descartes-bound bisection over exact dyadic rationals.
    exact,
    /// Taylor-model interval enclosures with rigorous floating-point error
    /// bounds; point signs fall back to exact arithmetic when the filter fails.
    filtered,
};

struct CountOptions {
    int depth_budget = 60;
    CountEngine engine = CountEngine::automatic;
    /// automatic uses the exact engine up to this degree.
    int exact_degree_limit = 32;
    /// Unresolved filtered cells are handed to the exact engine up to this degree.
    int exact_fallback_degree = 400;
    /// Square-free reduction (gcd with the derivative) up to this degree.
    int square_free_degree_limit = 64;
};

/// Counts the distinct real roots of p in the interval. Roots on an included
/// endpoint are counted once; a failing certificate never produces a guess,
/// it produces an uncertain cell.
RootCountResult count_certified(const KacPolynomial& p, const CountInterval& interval,
                                const CountOptions& options = {});

RootCountResult count_certified(const KacPolynomial& p, double lo, double hi, int depth_budget = 60);

/// Sign of p(x) in {-1, 0, 1}, exact.
int certified_sign(const KacPolynomial& p, double x);

/// Midpoints of isolating intervals refined to width <= tolerance.
std::vector<double> isolate_roots(const KacPolynomial& p, const CountInterval& interval, double tolerance = 1e-9,
                                  const CountOptions& options = {});

/// Bisection refinement of a cell with a certified sign change.
double refine_root(const KacPolynomial& p, RootCell cell, double tolerance);

/// Grid of the bulk interval in log coordinates: s_k = log m + k delta,
/// x_k = 1 - exp(-s_k), for k = 0..T with s_T <= log(n / ell).
struct PartitionSpec {
    int n = 0;
    double m = 0.0;
    double ell = 0.0;
    double delta = 0.0;
    std::vector<double> s;
    std::vector<double> x;

    std::size_t cell_count() const noexcept { return s.empty() ? 0 : s.size() - 1; }
};

/// Builds the partition; delta <= 0 selects the default m^(-1/6).
PartitionSpec make_partition(int n, double m, double ell, double delta = 0.0);

/// Number of adjacent grid pairs with values of strictly opposite sign.
int count_sign_changes(std::span<const double> values);

/// N* over the partition points, using certified signs.
int count_grid_sign_changes(const KacPolynomial& p, const PartitionSpec& spec);
int count_grid_sign_changes(const KacPolynomial& p, std::span<const double> points);

struct JensenOptions {
    int initial_angles = 256;
    double relative_tolerance = 1e-6;
    int max_angles = 1 << 16;
};

/// Jensen's zero-count bound for the closed disk B(center, r) using the
/// circle of radius R > r. The maximum on the large circle is bracketed from
/// above (sampled maximum plus a derivative bound over the sampling gap), the
/// one on the small circle from below, so the result never undercounts.
double jensen_root_bound(const KacPolynomial& p, double center, double r, double big_r,
                         const JensenOptions& options = {});

/// Greedy lacunary subsequence: l_1 = 0, l_{i+1} = min{t > l_i : a_{l_i} >= 2 a_t},
/// stopping after the first index whose value drops below the threshold, or
/// when the sequence is exhausted.
std::vector<std::size_t> lacunary_subsequence(std::span<const double> a, double threshold);

/// Roots of p in a region: 0 and 1 belong to unit+, -1 to unit-, so the four
/// regions add up to the number of distinct real roots.
RootCountResult count_region(const KacPolynomial& p, Region r, const CountOptions& options = {});

/// Interval (in the mapped [0, 1] coordinate) used by count_region.
CountInterval region_interval(Region r);

}  // namespace kaclab
