#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kaclab/coeff_sampling.hpp"
#include "kaclab/kac_poly.hpp"
#include "kaclab/limit_process.hpp"
#include "kaclab/root_count.hpp"

namespace kaclab {

/// Wilson score interval for k successes in `trials`, z = 1.96 by default.
std::pair<double, double> wilson_interval(std::int64_t successes, std::int64_t trials, double z = 1.959963984540054);

/// Where the roots of each sample are counted.
struct CountTarget {
    enum class Kind { interval, region, real_line };
    Kind kind = Kind::interval;
    CountInterval interval{0.0, 1.0, true, true};
    Region region = Region::unit_pos;

    static CountTarget on_interval(CountInterval i) { return {Kind::interval, i, Region::unit_pos}; }
    static CountTarget on_region(Region r) { return {Kind::region, {}, r}; }
    static CountTarget on_real_line() { return {Kind::real_line, {}, Region::unit_pos}; }

    std::string describe() const;
};

/// Certified count for one polynomial, or -1 when any cell stays uncertain.
int count_target(const KacPolynomial& p, const CountTarget& target, const CountOptions& options = {});

/// Gaussian Kac-Rice expectation of the number of distinct real roots in the
/// target. Intervals may be anywhere on the line; pieces outside [-1, 1] use
/// x -> 1/x and negative pieces x -> -x.
double reference_expected_count(int n, const CountTarget& target);

struct ExperimentConfig {
    int n = 1000;
    CoefficientDistribution dist = CoefficientDistribution::gaussian();
    int samples = 2000;
    CountTarget target;
    /// Tail scale: thresholds are reference_mean -/+ epsilon log n.
    double epsilon = 0.5;
    SeedSpec seed{42, 0};
    /// Worker threads; 0 resolves through KACLAB_THREADS and the hardware.
    int parallelism = 0;
    CountOptions count_options;

    /// Throws ParameterError naming the violated requirement.
    void validate() const;
};

struct TailReport {
    double mean_count = 0.0;
    double standard_error = 0.0;
    double reference_mean = 0.0;
    double threshold = 0.0;  ///< epsilon log n
    double tail_probability_lower = 0.0;
    double tail_probability_upper = 0.0;
    double tail_probability_two_sided = 0.0;
    std::pair<double, double> wilson_lower{0.0, 0.0};
    std::pair<double, double> wilson_upper{0.0, 0.0};
    std::pair<double, double> wilson_two_sided{0.0, 0.0};
    int samples = 0;   ///< samples entering the statistics
    int excluded = 0;  ///< samples dropped for uncertain cells
    /// More than 1% of the samples were excluded.
    bool exclusion_budget_exceeded = false;
};

struct RootCountRun {
    /// Per-sample counts in sample order; -1 marks an excluded sample.
    std::vector<int> counts;
    TailReport report;
};

RootCountRun run_root_count_mc(const ExperimentConfig& cfg);

/// Tail statistics of given counts (entries < 0 are exclusions).
TailReport summarize_counts(const std::vector<int>& counts, double reference_mean, double threshold);

/// CSV `sample_id,count` with excluded samples written as `NA`.
std::string counts_csv(const std::vector<int>& counts);

struct MultipleRootPoint {
    double delta = 0.0;
    double y = 0.0;
    std::int64_t events = 0;
    std::int64_t samples = 0;
    double probability = 0.0;
    std::pair<double, double> ci{0.0, 0.0};
    /// Zero events: ci is the one-sided rule-of-three bound [0, 3/samples].
    bool one_sided = false;
};

struct MultipleRootScan {
    double x_anchor = 0.0;
    std::vector<MultipleRootPoint> points;
    /// Least-squares slope of log P vs log delta over points with events.
    double slope = 0.0;
    int slope_points = 0;
    int excluded = 0;
};

/// P(N([x, y]) >= 2) for y = 1 - (1 - x) e^{-delta}, every delta evaluated on
/// the same polynomials.
MultipleRootScan multiple_root_scan(int n, double x_anchor, const std::vector<double>& deltas, int samples,
                                    const SeedSpec& seed, int threads = 0,
                                    const CoefficientDistribution& dist = CoefficientDistribution::gaussian());

struct SignChangeComparison {
    double delta = 0.0;
    int cells = 0;
    std::int64_t samples = 0;
    std::int64_t mismatches = 0;  ///< samples with N != N*
    double mismatch_probability = 0.0;
    std::pair<double, double> ci{0.0, 0.0};
    std::int64_t violations = 0;  ///< samples with N* > N
    double mean_roots = 0.0;
    double mean_sign_changes = 0.0;
    int excluded = 0;
};

/// Certified root count N on [x_0, x_T] against grid sign changes N* on the
/// same partition, sample by sample.
SignChangeComparison sign_change_vs_root_mc(int n, double m, double ell, double delta, int samples,
                                            const SeedSpec& seed, int threads = 0,
                                            const CoefficientDistribution& dist = CoefficientDistribution::gaussian());

struct LawCounts {
    std::string law;
    std::vector<int> counts;
    double mean = 0.0;
    double standard_error = 0.0;
    int excluded = 0;
};

struct DistributionDistance {
    std::string law_a;
    std::string law_b;
    double ks_distance = 0.0;
    /// sqrt(1/n_a + 1/n_b), the scale of the distance under equal laws.
    double ks_scale = 0.0;
    /// |P_a(N = k) - P_b(N = k)| for k = 0..max.
    std::vector<double> bin_gaps;
    double mean_gap = 0.0;
    double mean_gap_se = 0.0;
};

DistributionDistance compare_counts(const LawCounts& a, const LawCounts& b);

struct UniversalityReport {
    int n = 0;
    double m = 0.0;
    double ell = 0.0;
    std::vector<LawCounts> laws;  ///< gaussian, rademacher, uniform, gaussian (independent seed)
    std::vector<DistributionDistance> distances;  ///< pairwise among the first three, then self-comparison
};

/// Bulk root counts on I_{m, ell} with m = n^0.2, ell = 3 log n for the
/// Gaussian, Rademacher and uniform laws.
UniversalityReport universality_compare(int n, int samples, const SeedSpec& seed, int threads = 0);

struct Figure1Result {
    int n = 0;
    int samples = 0;
    /// (sample_id, root) for every certified root in [0, 1].
    std::vector<std::pair<int, double>> roots;
    /// Roots per sample; -1 marks an excluded sample.
    std::vector<int> sample_root_counts;
    double bulk_start = 0.0;  ///< 1 - n^{-0.2}
    double bulk_fraction = 0.0;
    double bulk_fraction_se = 0.0;
    double quadrature_ratio = 0.0;
    std::int64_t total_roots = 0;
    double expected_total = 0.0;
    double total_se = 0.0;
    int excluded = 0;
};

Figure1Result figure1_dataset(int n, int samples, const CoefficientDistribution& dist, const SeedSpec& seed,
                              int threads = 0);

/// CSV `sample_id,root`; a sample without roots (or excluded) contributes one
/// row with root `NA`, so every sample id appears.
std::string figure1_csv(const Figure1Result& result);

struct DyadicCell {
    int j = 0;
    double lo = 0.0;  ///< 1 - 2^{-j}
    double hi = 0.0;  ///< 1 - 2^{-j-1}
    std::vector<std::int64_t> histogram;  ///< samples with exactly k roots
    std::vector<double> exceedance;       ///< P(N >= h) per requested h
    int max_count = 0;
    int jensen_samples = 0;
    double jensen_mean = 0.0;
    double jensen_max = 0.0;
    /// Samples whose certified count exceeds the Jensen bound (must stay 0).
    int jensen_violations = 0;
};

struct DyadicScan {
    int n = 0;
    std::vector<int> h_values;
    std::vector<DyadicCell> cells;
    int samples = 0;
    int excluded = 0;
};

/// Root counts on the dyadic cells [1 - 2^{-j}, 1 - 2^{-j-1}] for
/// j = j_lo..j_hi; the Jensen bound with center at the cell midpoint,
/// R = cell width and r = R/2 is evaluated on the first `jensen_samples`.
DyadicScan dyadic_tail_scan(int n, int j_lo, int j_hi, const std::vector<int>& h_values, int samples,
                            const SeedSpec& seed, int threads = 0, int jensen_samples = 200,
                            const CoefficientDistribution& dist = CoefficientDistribution::gaussian());

struct AnticoncentrationPoint {
    double m = 0.0;
    double x = 0.0;  ///< 1 - 1/(4m)
    double threshold = 0.0;  ///< m^{-3} sqrt(V(x))
    std::size_t lacunary_length = 0;
    std::int64_t events = 0;
    double probability = 0.0;
    std::pair<double, double> ci{0.0, 0.0};
};

/// P(|f_n(x)| <= m^{-3} sqrt(V(x))) at x = 1 - 1/(4m) for each m, all m on
/// the same polynomials.
std::vector<AnticoncentrationPoint> anticoncentration(int n, const std::vector<double>& m_values, int samples,
                                                      const SeedSpec& seed, int threads = 0,
                                                      const CoefficientDistribution& dist =
                                                          CoefficientDistribution::gaussian());

struct LowerTailFloor {
    int n = 0;
    std::int64_t samples = 0;
    std::int64_t no_real_roots = 0;
    double probability = 0.0;
    std::pair<double, double> ci{0.0, 0.0};
    int excluded = 0;
};

/// P(N_n(R) = 0).
LowerTailFloor lower_tail_floor(int n, int samples, const SeedSpec& seed, int threads = 0,
                                const CoefficientDistribution& dist = CoefficientDistribution::rademacher());

struct ConcentrationTrend {
    std::vector<int> degrees;
    std::vector<TailReport> reports;
    /// Two-sided tail probabilities nonincreasing in n.
    bool nonincreasing = false;
};

/// Tails of N[0, 1] against the Kac-Rice mean for each degree.
ConcentrationTrend concentration_trend(const std::vector<int>& degrees, double epsilon, int samples,
                                       const SeedSpec& seed, int threads = 0,
                                       const CoefficientDistribution& dist = CoefficientDistribution::gaussian());

struct ProcessZeroStats {
    std::vector<int> counts;
    double mean = 0.0;
    double standard_error = 0.0;
    double expected = 0.0;  ///< (b - a) / (2 pi)
};

/// Sign changes of sampled paths of Z on a grid.
ProcessZeroStats process_zero_count_mc(const ProcessGrid& grid, int paths, const SeedSpec& seed, int threads = 0,
                                       SamplerKind sampler = SamplerKind::covariance_factor);

struct ProcessMoments {
    std::vector<double> means;
    std::vector<double> variances;
    /// Row-major Pearson correlations.
    std::vector<double> correlations;
    int draws = 0;
};

ProcessMoments process_moments(const ProcessGrid& grid, int draws, const SeedSpec& seed, int threads,
                               SamplerKind sampler);

struct SamplerAgreement {
    ProcessMoments covariance;
    ProcessMoments kernel;
    /// max over pairs of |r_cov - r_kernel| / combined SE.
    double max_correlation_z = 0.0;
    /// max over pairs of |r - sech| for either sampler.
    double max_target_gap = 0.0;
    bool agree = false;  ///< every pair within 3 combined SE
};

SamplerAgreement compare_samplers(const ProcessGrid& grid, int draws, const SeedSpec& seed, int threads = 0);

}  // namespace kaclab
