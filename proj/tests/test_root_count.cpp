#include <doctest.h>

#include <cmath>

#include "kaclab/coeff_sampling.hpp"
#include "kaclab/errors.hpp"
#include "kaclab/root_count.hpp"
#include "oracles.hpp"

using namespace kaclab;

namespace {

KacPolynomial from_roots(const std::vector<double>& roots, double lead = 1.0) {
    std::vector<double> c{lead};
    for (double r : roots) {
        std::vector<double> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i + 1] += c[i];
            next[i] -= r * c[i];
        }
        c = next;
    }
    return KacPolynomial(c);
}

}  // namespace

TEST_CASE("known roots, including endpoints and a double root") {
    // (x - 1/4)^2: one distinct root
    CHECK(count_certified(KacPolynomial({0.0625, -0.5, 1.0}), 0.0, 1.0).certified_count == 1);
    // (x - 1/2)(x - 1/4)(x + 1/2) on [0, 1]
    const auto p = from_roots({0.5, 0.25, -0.5});
    CHECK(count_certified(p, 0.0, 1.0).certified_count == 2);
    CHECK(count_certified(p, -1.0, 1.0).certified_count == 3);
    // endpoint inclusion
    CHECK(count_certified(p, CountInterval::closed(0.25, 0.5)).certified_count == 2);
    CHECK(count_certified(p, CountInterval::open(0.25, 0.5)).certified_count == 0);
    CHECK(count_certified(p, CountInterval{0.25, 0.5, true, false}).certified_count == 1);
    // degenerate interval
    CHECK(count_certified(p, CountInterval::closed(0.5, 0.5)).certified_count == 1);
    CHECK(count_certified(p, CountInterval::closed(0.6, 0.6)).certified_count == 0);
    // x^2 + 1 has none
    CHECK(count_certified(KacPolynomial({1.0, 0.0, 1.0}), -10.0, 10.0).certified_count == 0);
    // constant
    CHECK(count_certified(KacPolynomial({2.0}), 0.0, 1.0).certified_count == 0);
}

TEST_CASE("zero polynomial and bad intervals are rejected") {
    CHECK_THROWS_AS(count_certified(KacPolynomial({0.0, 0.0}), 0.0, 1.0), ParameterError);
    CHECK_THROWS_AS(count_certified(KacPolynomial({1.0, 1.0}), 1.0, 0.0), ParameterError);
}

TEST_CASE("close roots are separated") {
    const auto p = from_roots({0.5, 0.5 + 1.0 / 1024, 0.5 + 2.0 / 1024});
    CHECK(count_certified(p, 0.0, 1.0).certified_count == 3);
    const auto cells = count_certified(p, 0.0, 1.0).isolating_cells;
    REQUIRE(cells.size() == 3);
    CHECK(refine_root(p, cells[1], 1e-12) == doctest::Approx(0.5 + 1.0 / 1024).epsilon(1e-10));
}

TEST_CASE("engines agree with the Rolle-bracket oracle on random polynomials") {
    for (CountEngine engine : {CountEngine::exact, CountEngine::filtered, CountEngine::automatic}) {
        CountOptions opt;
        opt.engine = engine;
        int mismatches = 0, uncertain = 0;
        for (int k = 0; k < 300; ++k) {
            const int n = 1 + k % 40;
            const auto c = sample_coefficients(CoefficientDistribution::gaussian(), n, SeedSpec{77, 0}.child(k));
            const auto r = count_certified(KacPolynomial(c), CountInterval::closed(-1.5, 1.5), opt);
            if (!r.fully_certified()) ++uncertain;
            if (r.certified_count != oracle::count_roots(c, -1.5, 1.5)) ++mismatches;
        }
        CHECK(uncertain == 0);
        CHECK(mismatches == 0);
    }
}

TEST_CASE("filtered and exact engines agree at moderate degree") {
    CountOptions exact, filtered;
    exact.engine = CountEngine::exact;
    filtered.engine = CountEngine::filtered;
    for (int k = 0; k < 40; ++k) {
        const KacPolynomial p(sample_coefficients(CoefficientDistribution::gaussian(), 150, SeedSpec{8, 0}.child(k)));
        const auto a = count_certified(p, CountInterval::closed(0.0, 1.0), exact);
        const auto b = count_certified(p, CountInterval::closed(0.0, 1.0), filtered);
        REQUIRE(a.fully_certified());
        REQUIRE(b.fully_certified());
        CHECK(a.certified_count == b.certified_count);
    }
}

TEST_CASE("regions add up to the real-line count") {
    for (int k = 0; k < 50; ++k) {
        const auto c = sample_coefficients(CoefficientDistribution::gaussian(), 25, SeedSpec{21, 0}.child(k));
        int total = 0;
        for (Region r : all_regions) total += count_region(KacPolynomial(c), r).certified_count;
        // every root of a degree-25 polynomial lies within the Cauchy bound
        double bound = 0;
        for (double v : c) bound = std::max(bound, std::fabs(v / c.back()));
        CHECK(total == oracle::count_roots(c, -(1 + bound), 1 + bound));
    }
}

TEST_CASE("certified_sign") {
    const auto p = from_roots({0.5, 0.25});
    CHECK(certified_sign(p, 0.5) == 0);
    CHECK(certified_sign(p, 0.3) == -1);
    CHECK(certified_sign(p, 0.0) == 1);
    // tiny values next to a root still get the right sign
    CHECK(certified_sign(p, std::nextafter(0.5, 1.0)) == 1);
    CHECK(certified_sign(p, std::nextafter(0.5, 0.0)) == -1);
}

TEST_CASE("isolate_roots finds the located roots") {
    const auto roots = isolate_roots(from_roots({-0.75, 0.125, 0.875}), CountInterval::closed(-1.0, 1.0), 1e-12);
    REQUIRE(roots.size() == 3);
    CHECK(roots[0] == doctest::Approx(-0.75));
    CHECK(roots[1] == doctest::Approx(0.125));
    CHECK(roots[2] == doctest::Approx(0.875));
}

TEST_CASE("partition grid") {
    const int n = 10000;
    const double ell = 3 * std::log(n);
    const auto spec = make_partition(n, 10.0, ell);
    CHECK(spec.delta == doctest::Approx(std::pow(10.0, -1.0 / 6)));
    CHECK(spec.s.front() == doctest::Approx(std::log(10.0)));
    CHECK(spec.s.back() <= std::log(n / ell) + 1e-12);
    CHECK(spec.s.back() + spec.delta > std::log(n / ell));
    for (std::size_t k = 0; k < spec.s.size(); ++k) CHECK(spec.x[k] == doctest::Approx(1 - std::exp(-spec.s[k])));
    CHECK_THROWS_AS(make_partition(n, 1000.0, ell), ParameterError);
}

TEST_CASE("grid sign changes never exceed the root count") {
    const double values[] = {1.0, -2.0, -1.0, 0.0, 3.0, -1.0};
    CHECK(count_sign_changes(values) == 2);
    const int n = 2000;
    const auto spec = make_partition(n, std::pow(n, 0.25), 3 * std::log(n), 0.05);
    for (int k = 0; k < 30; ++k) {
        const KacPolynomial p(sample_coefficients(CoefficientDistribution::gaussian(), n, SeedSpec{4, 0}.child(k)));
        const auto roots = count_certified(p, CountInterval::closed(spec.x.front(), spec.x.back()));
        REQUIRE(roots.fully_certified());
        CHECK(count_grid_sign_changes(p, spec) <= roots.certified_count);
    }
}

TEST_CASE("Jensen bound dominates the certified count") {
    for (int k = 0; k < 20; ++k) {
        const KacPolynomial p(sample_coefficients(CoefficientDistribution::gaussian(), 500, SeedSpec{6, 0}.child(k)));
        const double lo = 0.875, hi = 0.9375;
        const double center = (lo + hi) / 2, big_r = hi - lo;
        const int roots = count_certified(p, lo, hi).certified_count;
        CHECK(jensen_root_bound(p, center, big_r / 2, big_r) >= roots);
    }
    // x^3 on a disk around 0 has a triple root: bound >= 3 up to rounding
    CHECK(jensen_root_bound(KacPolynomial({0.0, 0.0, 0.0, 1.0}), 0.0, 0.5, 1.0) >= 3.0 - 1e-9);
}

TEST_CASE("lacunary subsequence") {
    const double a[] = {1.0, 0.9, 0.5, 0.4, 0.2, 0.1, 0.05};
    const auto idx = lacunary_subsequence(a, 0.15);
    // 1 -> first value <= 1/2 at index 2 -> first <= 0.25 at 4 -> 0.1 at 5 (< threshold, stop)
    CHECK(idx == std::vector<std::size_t>{0, 2, 4, 5});
    // threshold at the last value: runs until the sequence is exhausted
    CHECK(lacunary_subsequence(a, 0.05) == std::vector<std::size_t>{0, 2, 4, 5, 6});
    CHECK_THROWS_AS(lacunary_subsequence(a, 0.0), ParameterError);
}
