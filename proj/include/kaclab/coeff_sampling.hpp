#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kaclab {

/// Reproducible stream identifier. Streams with distinct (master_seed,
/// stream_index) pairs are derived through a fixed 64-bit mixer, so parallel
/// tasks that each own an index never share random numbers.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;

    /// Stream for sub-task `index` of this stream.
    SeedSpec child(std::uint64_t index) const;

    friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

using RandomEngine = std::mt19937_64;

RandomEngine make_engine(const SeedSpec& seed);

enum class DistributionKind { gaussian, rademacher, uniform_symmetric, pareto_symmetrized };

/// Law of the coefficients: mean 0, variance 1, and a finite
/// (2 + epsilon0)-th absolute moment bounded by c0_bound.
class CoefficientDistribution {
public:
    static constexpr double default_epsilon0 = 0.25;
    static constexpr double default_pareto_exponent = 2.5;

    static CoefficientDistribution gaussian(double epsilon0 = default_epsilon0);
    static CoefficientDistribution rademacher(double epsilon0 = default_epsilon0);
    static CoefficientDistribution uniform_symmetric(double epsilon0 = default_epsilon0);
    static CoefficientDistribution pareto_symmetrized(double exponent = default_pareto_exponent,
                                                      double epsilon0 = default_epsilon0);

    /// Parses `gaussian`, `rademacher`, `uniform`, `pareto:<exponent>`.
    static CoefficientDistribution parse(std::string_view spec, double epsilon0 = default_epsilon0);

    DistributionKind kind() const noexcept { return kind_; }
    double exponent() const noexcept { return exponent_; }
    double epsilon0() const noexcept { return epsilon0_; }
    double c0_bound() const noexcept { return c0_bound_; }

    /// Returns a copy with a user-declared moment bound; it must dominate the
    /// analytic (2 + epsilon0)-moment.
    CoefficientDistribution with_c0_bound(double bound) const;

    /// E|xi|^p in closed form.
    double analytic_abs_moment(double p) const;

    /// Grammar form, round-trips through parse().
    std::string to_string() const;

    double draw(RandomEngine& engine) const;

    /// Fills `out` with i.i.d. draws from this law.
    void fill(RandomEngine& engine, std::span<double> out) const;

private:
    CoefficientDistribution(DistributionKind kind, double exponent, double epsilon0);

    DistributionKind kind_;
    double exponent_ = 0.0;
    double epsilon0_;
    double pareto_scale_ = 1.0;
    double c0_bound_;
};

/// i.i.d. coefficients xi_0..xi_n; deterministic given the seed.
std::vector<double> sample_coefficients(const CoefficientDistribution& dist, int n, const SeedSpec& seed);

struct MomentReport {
    double mean = 0.0;
    /// Second moment about the law's declared mean (zero).
    double variance = 0.0;
    /// Empirical E|xi|^(2 + epsilon0).
    double abs_moment_2_eps = 0.0;
    std::int64_t sample_count = 0;
};

MomentReport moment_report(const CoefficientDistribution& dist, std::int64_t sample_count, const SeedSpec& seed);

}  // namespace kaclab
