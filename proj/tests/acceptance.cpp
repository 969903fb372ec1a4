// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kaclab/experiments.hpp"
#include "kaclab/kac_rice.hpp"
#include "kaclab/parallel.hpp"
#include "kaclab/sign_compare.hpp"
#include "oracles.hpp"

using namespace kaclab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

const int threads = resolve_threads(0);

ExperimentConfig mean_run_config() {
    ExperimentConfig cfg;
    cfg.n = 1000;
    cfg.samples = 2000;
    cfg.seed = {2024, 0};
    cfg.target = CountTarget::on_interval(CountInterval::closed(0.0, 1.0));
    cfg.parallelism = threads;
    return cfg;
}

// Criterion 5 pairs feed criterion 6.
std::vector<CovariancePair> convergence_pairs;

Outcome kac_rice_mean() {
    const auto start = std::chrono::steady_clock::now();
    const auto run = run_root_count_mc(mean_run_config());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto& r = run.report;
    const double oracle_ref = static_cast<double>(oracle::expected_count(1000, 0.0L, 1.0L));
    const bool quadrature_ok = std::fabs(r.reference_mean - oracle_ref) <= 1e-6;
    const double z = std::fabs(r.mean_count - r.reference_mean) / r.standard_error;
    return {quadrature_ok && z <= 3.0 && !r.exclusion_budget_exceeded,
            fmt("mean N[0,1] = %.4f +- %.4f, Kac-Rice %.6f (Simpson oracle %.6f), |z| = %.2f, excluded %d, %.1f s",
                r.mean_count, r.standard_error, r.reference_mean, oracle_ref, z, r.excluded, secs)};
}

Outcome global_mean() {
    auto cfg = mean_run_config();
    cfg.target = CountTarget::on_real_line();
    const auto run = run_root_count_mc(cfg);
    const auto& r = run.report;
    const double oracle_ref = 4.0 * static_cast<double>(oracle::expected_count(1000, 0.0L, 1.0L));
    const double lib_ref = expected_count_real_line(1000);
    const double leading = 2.0 / std::numbers::pi * std::log(1000.0);
    const double z = std::fabs(r.mean_count - lib_ref) / r.standard_error;
    const bool ok = std::fabs(lib_ref - oracle_ref) <= 4e-6 && std::fabs(leading - 4.397) < 1e-3 && z <= 3.0 &&
                    !r.exclusion_budget_exceeded;
    return {ok, fmt("mean N(R) = %.4f +- %.4f, Kac-Rice %.6f (oracle gap %.1e), leading term %.4f, constant %.4f, "
                    "|z| = %.2f, excluded %d",
                    r.mean_count, r.standard_error, lib_ref, std::fabs(lib_ref - oracle_ref), leading,
                    lib_ref - leading, z, r.excluded)};
}

Outcome process_zeros() {
    const auto grid = ProcessGrid::uniform(0.0, 20.0, 0.01);
    const auto stats = process_zero_count_mc(grid, 2000, {2024, 3}, threads);
    const double target = 20.0 / (2.0 * std::numbers::pi);
    const double z = std::fabs(stats.mean - target) / stats.standard_error;
    const bool ok = std::fabs(target - 3.1831) < 1e-4 && std::fabs(stats.expected - target) < 1e-12 && z <= 3.0;
    return {ok, fmt("mean sign changes on [0,20] = %.4f +- %.4f, target %.4f, |z| = %.2f", stats.mean,
                    stats.standard_error, target, z)};
}

Outcome sampler_agreement() {
    const auto grid = ProcessGrid::uniform(0.0, 2.0, 0.5);
    const auto a = compare_samplers(grid, 100000, {2024, 4}, threads);
    // independent check of the analytic target sech((t_i - t_j)/2)
    double target_gap = 0.0;
    const std::size_t w = grid.size();
    for (std::size_t i = 0; i < w; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double t = static_cast<double>(oracle::sech_half(grid.points[i] - grid.points[j]));
            target_gap = std::max({target_gap, std::fabs(a.covariance.correlations[i * w + j] - t),
                                   std::fabs(a.kernel.correlations[i * w + j] - t)});
        }
    }
    const bool ok = w == 5 && a.agree && a.max_correlation_z <= 3.0 && target_gap < 0.01;
    return {ok, fmt("%zu-point grid, 1e5 draws: max pairwise |r_cov - r_kernel| / SE = %.2f, max |r - sech| = %.4f", w,
                    a.max_correlation_z, target_gap)};
}

double oracle_gap(int n, const PartitionSpec& spec) {
    double gap = 0.0;
    for (std::size_t i = 0; i < spec.x.size(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const auto c = oracle::covariance(n, spec.x[i], spec.x[j]);
            gap = std::max(gap, static_cast<double>(std::fabs(c - oracle::sech_half(spec.s[i] - spec.s[j]))));
        }
    }
    return gap;
}

Outcome covariance_convergence() {
    const int n = 10000;
    const double ell = 3.0 * std::log(static_cast<double>(n));
    double gaps[2];
    std::string detail;
    bool consistent = true;
    for (int k = 0; k < 2; ++k) {
        const double m = k == 0 ? 10.0 : 100.0;
        const auto spec = make_partition(n, m, ell);
        convergence_pairs.push_back(build_covariance_pair(n, spec));
        gaps[k] = convergence_pairs.back().max_entry_gap;
        const double ref = oracle_gap(n, spec);
        consistent = consistent && std::fabs(gaps[k] - ref) <= 1e-9;
        detail += fmt("m=%g: dim %d, gap %.6f (oracle %.6f); ", m, convergence_pairs.back().dimension, gaps[k], ref);
    }
    const double factor = gaps[0] / gaps[1];
    return {consistent && factor >= 5.0 && factor <= 20.0, detail + fmt("factor %.2f", factor)};
}

Outcome powers_stormer() {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g;
    std::uniform_int_distribution<int> dim_dist(1, 50);
    auto random_psd = [&](int dim) {
        const int rank = std::uniform_int_distribution<int>(1, dim)(rng);
        Eigen::MatrixXd x(dim, rank);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < rank; ++j) x(i, j) = g(rng);
        return Eigen::MatrixXd(x * x.transpose() / rank);
    };
    int violations = 0, instances = 0;
    double worst = -1e300;
    auto check = [&](const PowersStormerMargin& ps) {
        ++instances;
        worst = std::max(worst, ps.lhs - ps.rhs);
        if (!(ps.lhs <= ps.rhs + 1e-8)) ++violations;
    };
    for (int k = 0; k < 1000; ++k) {
        const int dim = dim_dist(rng);
        const auto a = random_psd(dim);
        const auto b = random_psd(dim);
        check(powers_stormer_margin(a, b));
    }
    for (const auto& pair : convergence_pairs) check(powers_stormer_margin(pair));
    return {violations == 0 && convergence_pairs.size() == 2,
            fmt("%d instances (1000 random, %zu covariance pairs), violations %d, max lhs - rhs = %.3e", instances,
                convergence_pairs.size(), violations, worst)};
}

Outcome multiple_root_scaling() {
    const auto scan = multiple_root_scan(2000, 0.99, {0.4, 0.2, 0.1, 0.05}, 100000, {2024, 7}, threads);
    std::string detail;
    for (const auto& p : scan.points) {
        detail += fmt("delta %.2f: %lld events; ", p.delta, static_cast<long long>(p.events));
    }
    const bool ok = scan.slope_points >= 2 && scan.slope >= 1.2 && scan.excluded * 100 < 100000;
    return {ok, detail + fmt("slope %.2f over %d points, excluded %d", scan.slope, scan.slope_points, scan.excluded)};
}

Outcome counter_oracle() {
    int mismatches = 0, uncertain = 0, roots = 0;
    const SeedSpec seed{2024, 8};
    for (int k = 0; k < 10000; ++k) {
        const int n = 1 + k % 20;
        const auto c = sample_coefficients(CoefficientDistribution::gaussian(), n, seed.child(static_cast<std::uint64_t>(k)));
        const auto r = count_certified(KacPolynomial(c), CountInterval::closed(-2.0, 2.0));
        const int expected = oracle::count_roots(c, -2.0, 2.0);
        roots += expected;
        if (!r.fully_certified()) ++uncertain;
        if (r.certified_count != expected) ++mismatches;
    }
    return {mismatches == 0 && uncertain == 0,
            fmt("10^4 polynomials of degree 1..20 on [-2,2], %d roots, mismatches %d, uncertain %d", roots, mismatches,
                uncertain)};
}

Outcome figure_one() {
    const auto r = figure1_dataset(1000, 100, CoefficientDistribution::gaussian(), {2024, 9}, threads);
    const double bulk = 1.0 - std::pow(1000.0, -0.2);
    const double oracle_ratio = static_cast<double>(oracle::expected_count(1000, bulk, 1.0L) /
                                                    oracle::expected_count(1000, 0.0L, 1.0L));
    const double z = std::fabs(r.bulk_fraction - r.quadrature_ratio) / r.bulk_fraction_se;
    const bool ok = std::fabs(r.quadrature_ratio - oracle_ratio) <= 1e-6 && z <= 3.0 && r.excluded == 0;
    return {ok, fmt("bulk [%.4f,1]: %lld roots, fraction %.4f +- %.4f, quadrature ratio %.6f (oracle %.6f), |z| = %.2f",
                    r.bulk_start, static_cast<long long>(r.total_roots), r.bulk_fraction, r.bulk_fraction_se,
                    r.quadrature_ratio, oracle_ratio, z)};
}

Outcome concentration() {
    const auto t = concentration_trend({100, 1000, 10000}, 0.5, 2000, {2024, 10}, threads);
    std::string detail;
    bool budget = true;
    for (std::size_t k = 0; k < t.degrees.size(); ++k) {
        detail += fmt("n=%d: P = %.4f; ", t.degrees[k], t.reports[k].tail_probability_two_sided);
        budget = budget && !t.reports[k].exclusion_budget_exceeded;
    }
    const double last = t.reports.back().tail_probability_two_sided;
    return {t.nonincreasing && last < 0.05 && budget, detail + (t.nonincreasing ? "nonincreasing" : "not monotone")};
}

Outcome determinism() {
    auto cfg = mean_run_config();
    cfg.parallelism = 1;
    const auto one = counts_csv(run_root_count_mc(cfg).counts);
    cfg.parallelism = 8;
    const auto eight = counts_csv(run_root_count_mc(cfg).counts);
    return {one == eight, fmt("per-sample CSV %zu bytes, parallelism 1 vs 8 %s", one.size(),
                              one == eight ? "identical" : "DIFFER")};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"Kac-Rice mean on [0,1] (n=1000, 2000 samples)", kac_rice_mean},
        {"mean number of real roots (n=1000)", global_mean},
        {"zeros of the limiting process on [0,20]", process_zeros},
        {"covariance-factor vs kernel sampler", sampler_agreement},
        {"covariance convergence m=10 -> 100 (n=10^4)", covariance_convergence},
        {"Powers-Stormer inequality", powers_stormer},
        {"multiple-root scaling (n=2000)", multiple_root_scaling},
        {"certified counter vs root oracle", counter_oracle},
        {"bulk concentration of roots (n=1000, 100 samples)", figure_one},
        {"concentration trend n=100,1000,10000", concentration},
        {"determinism across thread counts", determinism},
    };
    std::printf("acceptance: %d worker thread(s)\n", threads);
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("%s [%zu] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
    return failures == 0 ? 0 : 1;
}
