#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kaclab/errors.hpp"
#include "kaclab/kac_rice.hpp"
#include "oracles.hpp"

using namespace kaclab;

TEST_CASE("density matches the moment formula") {
    for (int n : {1, 2, 10, 1000}) {
        for (double x : {0.0, 0.2, 0.5, 0.9, 0.99, 0.999}) {
            CAPTURE(n);
            CAPTURE(x);
            CHECK(density_rho1(n, x) == doctest::Approx(static_cast<double>(oracle::density(n, x))).epsilon(1e-9));
            CHECK(density_rho1(n, -x) == density_rho1(n, x));
        }
    }
    CHECK(density_rho1(7, 0.0) == doctest::Approx(1.0 / std::numbers::pi));
}

TEST_CASE("density at x = 1 is sqrt(n(n+2)/12) / pi") {
    for (int n : {1, 10, 1000, 100000}) {
        const double limit = std::sqrt(n * (n + 2.0) / 12.0) / std::numbers::pi;
        CHECK(density_rho1(n, 1.0) == doctest::Approx(limit).epsilon(1e-12));
        // continuity from below
        CHECK(density_rho1(n, 1.0 - 1e-9 / n) == doctest::Approx(limit).epsilon(1e-6));
    }
}

TEST_CASE("density profile grid") {
    const auto prof = density_profile(100, 5);
    REQUIRE(prof.grid.size() == 5);
    CHECK(prof.grid.front() == 0.0);
    CHECK(prof.grid.back() == 1.0);
    CHECK(prof.values[2] == density_rho1(100, 0.5));
    CHECK_THROWS_AS(density_profile(100, 1), ParameterError);
}

TEST_CASE("expected counts agree with Simpson's rule on the moment formula") {
    for (int n : {1, 2, 10, 100, 1000}) {
        CAPTURE(n);
        CHECK(expected_count(n, 0.0, 1.0) == doctest::Approx(static_cast<double>(oracle::expected_count(n, 0.0L, 1.0L))).epsilon(1e-7));
        CHECK(expected_count(n, 0.3, 0.95) ==
              doctest::Approx(static_cast<double>(oracle::expected_count(n, 0.3L, 0.95L))).epsilon(1e-7));
    }
    // n = 1: one root -xi_0/xi_1, a Cauchy variable, lands in [0, 1] with probability 1/4
    CHECK(expected_count(1, 0.0, 1.0) == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("real-line expectation and its logarithmic growth") {
    CHECK(expected_count_real_line(1000) == doctest::Approx(4 * expected_count(1000, 0, 1)));
    for (Region r : all_regions) CHECK(expected_count_region(1000, r) == expected_count(1000, 0, 1));
    // (2/pi) log n plus a bounded correction
    const double d1 = expected_count_real_line(100000) - expected_count_real_line(10000);
    CHECK(d1 == doctest::Approx(2 / std::numbers::pi * std::log(10.0)).epsilon(1e-3));
}

TEST_CASE("domain checks") {
    CHECK_THROWS_AS(expected_count(10, 0.5, 0.2), DomainError);
    CHECK_THROWS_AS(expected_count(10, 0.0, 1.5), DomainError);
    CHECK_THROWS_AS(density_rho1(10, 1.5), DomainError);
    CHECK_THROWS_AS(density_rho1(0, 0.5), ParameterError);
}
