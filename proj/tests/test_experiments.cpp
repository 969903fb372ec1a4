#include <doctest.h>

#include <cmath>

#include "kaclab/errors.hpp"
#include "kaclab/experiments.hpp"
#include "kaclab/kac_rice.hpp"

using namespace kaclab;

TEST_CASE("Wilson interval") {
    // closed form for z = 1.96, k = 10, n = 100
    const double z = 1.959963984540054, p = 0.1, n = 100;
    const double center = (p + z * z / (2 * n)) / (1 + z * z / n);
    const double half = z / (1 + z * z / n) * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
    const auto [lo, hi] = wilson_interval(10, 100);
    CHECK(lo == doctest::Approx(center - half));
    CHECK(hi == doctest::Approx(center + half));
    CHECK(wilson_interval(0, 50).first == 0.0);
    CHECK(wilson_interval(50, 50).second == doctest::Approx(1.0));
}

TEST_CASE("tail summary of fixed counts") {
    const std::vector<int> counts{0, 1, 2, 3, 4, -1};
    const auto r = summarize_counts(counts, 2.0, 1.5);
    CHECK(r.samples == 5);
    CHECK(r.excluded == 1);
    CHECK(r.exclusion_budget_exceeded);
    CHECK(r.mean_count == doctest::Approx(2.0));
    CHECK(r.standard_error == doctest::Approx(std::sqrt(2.5 / 5)));
    // |N - 2| >= 1.5 for N in {0, 4}
    CHECK(r.tail_probability_lower == doctest::Approx(0.2));
    CHECK(r.tail_probability_upper == doctest::Approx(0.2));
    CHECK(r.tail_probability_two_sided == doctest::Approx(0.4));
    CHECK(counts_csv(counts) == "sample_id,count\n0,0\n1,1\n2,2\n3,3\n4,4\n5,NA\n");
}

TEST_CASE("reference expectation maps targets onto [0, 1]") {
    const int n = 200;
    CHECK(reference_expected_count(n, CountTarget::on_interval(CountInterval::closed(-0.5, 0.25))) ==
          doctest::Approx(expected_count(n, 0, 0.5) + expected_count(n, 0, 0.25)));
    // [-4, -2] maps to [1/4, 1/2] under x -> -1/x
    CHECK(reference_expected_count(n, CountTarget::on_interval(CountInterval::closed(-4, -2))) ==
          doctest::Approx(expected_count(n, 0.25, 0.5)));
    CHECK(reference_expected_count(n, CountTarget::on_real_line()) == doctest::Approx(expected_count_real_line(n)));
    CHECK(reference_expected_count(n, CountTarget::on_region(Region::outer_neg)) ==
          doctest::Approx(expected_count(n, 0, 1)));
}

TEST_CASE("Monte Carlo runs are independent of the thread count") {
    ExperimentConfig cfg;
    cfg.n = 300;
    cfg.samples = 200;
    cfg.target = CountTarget::on_real_line();
    cfg.parallelism = 1;
    const auto a = run_root_count_mc(cfg);
    cfg.parallelism = 3;
    const auto b = run_root_count_mc(cfg);
    CHECK(a.counts == b.counts);
    CHECK(counts_csv(a.counts) == counts_csv(b.counts));
    CHECK(a.report.excluded == 0);
    CHECK(std::fabs(a.report.mean_count - a.report.reference_mean) <= 4 * a.report.standard_error);
}

TEST_CASE("configuration validation") {
    ExperimentConfig cfg;
    cfg.samples = 0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg.samples = 10;
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
}

TEST_CASE("no real roots for Rademacher quadratics has probability 1/2") {
    // +-1 +- x +- x^2 has no real root exactly when xi_0 xi_2 = 1
    const auto r = lower_tail_floor(2, 20000, {3, 0}, 1);
    CHECK(std::fabs(r.probability - 0.5) < 4 * std::sqrt(0.25 / 20000));
    CHECK(r.ci.first <= r.probability);
    CHECK(r.probability <= r.ci.second);
}

TEST_CASE("multiple-root probabilities grow with the interval") {
    const auto scan = multiple_root_scan(500, 0.98, {0.8, 0.4, 0.2}, 3000, {5, 0}, 1);
    REQUIRE(scan.points.size() == 3);
    for (const auto& p : scan.points) {
        for (const auto& q : scan.points) {
            if (p.delta > q.delta) CHECK(p.events >= q.events);
        }
    }
    CHECK(scan.points[0].y == doctest::Approx(1 - 0.02 * std::exp(-0.8)));
    CHECK_THROWS_AS(multiple_root_scan(500, 1.5, {0.1}, 10, {5, 0}, 1), ParameterError);
}

TEST_CASE("identical count samples have zero distance") {
    LawCounts a{"a", {1, 2, 2, 3}, 2.0, 0.0, 0};
    const auto d = compare_counts(a, a);
    CHECK(d.ks_distance == 0.0);
    CHECK(d.mean_gap == 0.0);
    LawCounts b{"b", {3, 3, 3, 3}, 3.0, 0.0, 0};
    CHECK(compare_counts(a, b).ks_distance == doctest::Approx(0.75));
}

TEST_CASE("figure dataset lists every sample") {
    const auto r = figure1_dataset(200, 12, CoefficientDistribution::gaussian(), {1, 0}, 1);
    const auto csv = figure1_csv(r);
    for (int id = 0; id < 12; ++id) {
        CHECK(csv.find("\n" + std::to_string(id) + ",") != std::string::npos);
    }
    std::int64_t total = 0;
    for (int c : r.sample_root_counts) total += std::max(c, 0);
    CHECK(total == r.total_roots);
    CHECK(r.quadrature_ratio == doctest::Approx(expected_count(200, r.bulk_start, 1) / expected_count(200, 0, 1)));
}

TEST_CASE("dyadic scan and Jensen bound") {
    const auto scan = dyadic_tail_scan(400, 0, 3, {1, 2, 5}, 300, {2, 0}, 1, 50);
    REQUIRE(scan.cells.size() == 4);
    for (const auto& cell : scan.cells) {
        CHECK(cell.jensen_violations == 0);
        CHECK(cell.exceedance[0] >= cell.exceedance[1]);
        CHECK(cell.exceedance[1] >= cell.exceedance[2]);
        CHECK(cell.hi == doctest::Approx(1 - std::pow(2.0, -cell.j - 1)));
    }
}

TEST_CASE("anticoncentration events shrink with m") {
    const auto pts = anticoncentration(1000, {8, 16}, 20000, {4, 0}, 1);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].x == doctest::Approx(1 - 1.0 / 32));
    CHECK(pts[0].probability >= pts[1].probability);
    CHECK(pts[0].lacunary_length > 0);
}

TEST_CASE("sign changes never exceed certified roots") {
    const int n = 1000;
    const auto r = sign_change_vs_root_mc(n, std::pow(n, 0.25), 3 * std::log(n), 0.05, 300, {6, 0}, 1);
    CHECK(r.violations == 0);
    CHECK(r.mean_sign_changes <= r.mean_roots);
}

TEST_CASE("samplers agree on a short grid") {
    const auto agreement = compare_samplers(ProcessGrid::irregular({0.0, 0.5, 1.0}), 4000, {8, 0}, 1);
    CHECK(agreement.agree);
    CHECK(agreement.max_target_gap < 0.06);
}
