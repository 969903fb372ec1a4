#include <doctest.h>

#include <cmath>

#include "kaclab/coeff_sampling.hpp"
#include "kaclab/errors.hpp"

using namespace kaclab;

TEST_CASE("seed streams are reproducible and distinct") {
    const SeedSpec s{42, 0};
    CHECK(sample_coefficients(CoefficientDistribution::gaussian(), 50, s) ==
          sample_coefficients(CoefficientDistribution::gaussian(), 50, s));
    CHECK(sample_coefficients(CoefficientDistribution::gaussian(), 50, s.child(1)) !=
          sample_coefficients(CoefficientDistribution::gaussian(), 50, s.child(2)));
    CHECK(s.child(3) == s.child(3));
    CHECK_FALSE(s.child(3) == SeedSpec{43, 0}.child(3));
}

TEST_CASE("sample_coefficients returns n + 1 values") {
    CHECK(sample_coefficients(CoefficientDistribution::rademacher(), 0, {1, 0}).size() == 1);
    CHECK(sample_coefficients(CoefficientDistribution::rademacher(), 17, {1, 0}).size() == 18);
    CHECK_THROWS_AS(sample_coefficients(CoefficientDistribution::gaussian(), -1, {1, 0}), ParameterError);
}

TEST_CASE("rademacher and uniform supports") {
    for (double v : sample_coefficients(CoefficientDistribution::rademacher(), 500, {5, 0})) {
        CHECK(std::fabs(v) == 1.0);
    }
    const double edge = std::sqrt(3.0);
    for (double v : sample_coefficients(CoefficientDistribution::uniform_symmetric(), 500, {5, 0})) {
        CHECK(std::fabs(v) <= edge);
    }
}

TEST_CASE("laws are centered with unit variance") {
    for (const char* spec : {"gaussian", "rademacher", "uniform", "pareto:2.5"}) {
        CAPTURE(spec);
        const auto dist = CoefficientDistribution::parse(spec);
        const auto r = moment_report(dist, 400000, {11, 0});
        CHECK(std::fabs(r.mean) < 0.02);
        const double tol = dist.kind() == DistributionKind::pareto_symmetrized ? 0.1 : 0.015;
        CHECK(std::fabs(r.variance - 1.0) < tol);
        CHECK(r.abs_moment_2_eps <= dist.c0_bound() * 1.2);
    }
}

TEST_CASE("analytic absolute moments match closed forms") {
    // E|g|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi)
    const double p = 2.25;
    const double gauss = std::pow(2.0, p / 2) * std::tgamma((p + 1) / 2) / std::sqrt(M_PI);
    CHECK(CoefficientDistribution::gaussian().analytic_abs_moment(p) == doctest::Approx(gauss).epsilon(1e-12));
    CHECK(CoefficientDistribution::rademacher().analytic_abs_moment(p) == doctest::Approx(1.0));
    // uniform on [-sqrt3, sqrt3]: 3^{p/2} / (p + 1)
    CHECK(CoefficientDistribution::uniform_symmetric().analytic_abs_moment(p) ==
          doctest::Approx(std::pow(3.0, p / 2) / (p + 1)).epsilon(1e-12));
}

TEST_CASE("parse round-trips and rejects bad laws") {
    for (const char* spec : {"gaussian", "rademacher", "uniform", "pareto:3"}) {
        const auto dist = CoefficientDistribution::parse(spec);
        CHECK(CoefficientDistribution::parse(dist.to_string()).to_string() == dist.to_string());
    }
    CHECK_THROWS_AS(CoefficientDistribution::parse("cauchy"), ParameterError);
    CHECK_THROWS_AS(CoefficientDistribution::parse("pareto:1.5"), ParameterError);
    // the (2 + eps0)-moment must be finite: alpha > 2 + eps0
    CHECK_THROWS_AS(CoefficientDistribution::parse("pareto:2.2", 0.25), ParameterError);
    CHECK_THROWS_AS(CoefficientDistribution::gaussian(0.0), ParameterError);
}
