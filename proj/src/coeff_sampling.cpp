#include "kaclab/coeff_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "kaclab/errors.hpp"

namespace kaclab {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

SeedSpec SeedSpec::child(std::uint64_t index) const {
    return SeedSpec{mix64(master_seed ^ mix64(stream_index + 0x632be59bd9b4e019ULL)), index};
}

RandomEngine make_engine(const SeedSpec& seed) {
    const std::uint64_t a = mix64(seed.master_seed);
    const std::uint64_t b = mix64(a ^ mix64(seed.stream_index ^ 0xd1b54a32d192ed03ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return RandomEngine(seq);
}

namespace {

double gaussian_abs_moment(double p) {
    return std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
}

}  // namespace

CoefficientDistribution::CoefficientDistribution(DistributionKind kind, double exponent, double epsilon0)
    : kind_(kind), exponent_(exponent), epsilon0_(epsilon0), c0_bound_(0.0) {
    if (!(epsilon0 > 0.0) || !std::isfinite(epsilon0)) {
        throw ParameterError("epsilon0 must be a positive finite number");
    }
    if (kind == DistributionKind::pareto_symmetrized) {
        if (!(exponent > 2.0) || !std::isfinite(exponent)) {
            throw ParameterError("pareto exponent must exceed 2 (finite variance)");
        }
        if (!(exponent > 2.0 + epsilon0)) {
            throw ParameterError("pareto exponent must exceed 2 + epsilon0 for a finite (2+epsilon0)-moment");
        }
        pareto_scale_ = std::sqrt((exponent - 2.0) / exponent);
    }
    c0_bound_ = analytic_abs_moment(2.0 + epsilon0_);
}

CoefficientDistribution CoefficientDistribution::gaussian(double epsilon0) {
    return {DistributionKind::gaussian, 0.0, epsilon0};
}

CoefficientDistribution CoefficientDistribution::rademacher(double epsilon0) {
    return {DistributionKind::rademacher, 0.0, epsilon0};
}

CoefficientDistribution CoefficientDistribution::uniform_symmetric(double epsilon0) {
    return {DistributionKind::uniform_symmetric, 0.0, epsilon0};
}

CoefficientDistribution CoefficientDistribution::pareto_symmetrized(double exponent, double epsilon0) {
    return {DistributionKind::pareto_symmetrized, exponent, epsilon0};
}

CoefficientDistribution CoefficientDistribution::parse(std::string_view spec, double epsilon0) {
    if (spec == "gaussian") return gaussian(epsilon0);
    if (spec == "rademacher") return rademacher(epsilon0);
    if (spec == "uniform") return uniform_symmetric(epsilon0);
    if (spec.starts_with("pareto")) {
        if (spec == "pareto") return pareto_symmetrized(default_pareto_exponent, epsilon0);
        if (spec.size() > 7 && spec[6] == ':') {
            const std::string text(spec.substr(7));
            std::size_t used = 0;
            double exponent = 0.0;
            try {
                exponent = std::stod(text, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != text.size() || used == 0) {
                throw ParameterError("malformed pareto exponent in distribution spec '" + std::string(spec) + "'");
            }
            return pareto_symmetrized(exponent, epsilon0);
        }
    }
    throw ParameterError("unknown distribution '" + std::string(spec) +
                         "' (expected gaussian, rademacher, uniform or pareto:<exponent>)");
}

CoefficientDistribution CoefficientDistribution::with_c0_bound(double bound) const {
    const double analytic = analytic_abs_moment(2.0 + epsilon0_);
    if (!(bound >= analytic)) {
        throw ParameterError("c0_bound " + std::to_string(bound) + " is below the analytic (2+eps0)-moment " +
                             std::to_string(analytic));
    }
    CoefficientDistribution copy = *this;
    copy.c0_bound_ = bound;
    return copy;
}

double CoefficientDistribution::analytic_abs_moment(double p) const {
    switch (kind_) {
        case DistributionKind::gaussian:
            return gaussian_abs_moment(p);
        case DistributionKind::rademacher:
            return 1.0;
        case DistributionKind::uniform_symmetric:
            return std::pow(3.0, p / 2.0) / (p + 1.0);
        case DistributionKind::pareto_symmetrized:
            if (p >= exponent_) return std::numeric_limits<double>::infinity();
            return std::pow(pareto_scale_, p) * exponent_ / (exponent_ - p);
    }
    return 0.0;
}

std::string CoefficientDistribution::to_string() const {
    switch (kind_) {
        case DistributionKind::gaussian:
            return "gaussian";
        case DistributionKind::rademacher:
            return "rademacher";
        case DistributionKind::uniform_symmetric:
            return "uniform";
        case DistributionKind::pareto_symmetrized: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "pareto:%.17g", exponent_);
            return buf;
        }
    }
    return {};
}

void CoefficientDistribution::fill(RandomEngine& engine, std::span<double> out) const {
    switch (kind_) {
        case DistributionKind::gaussian: {
            std::normal_distribution<double> normal;
            for (double& v : out) v = normal(engine);
            return;
        }
        case DistributionKind::rademacher:
            for (double& v : out) v = (engine() >> 63) ? 1.0 : -1.0;
            return;
        case DistributionKind::uniform_symmetric: {
            const double half_width = std::sqrt(3.0);
            std::uniform_real_distribution<double> uniform(-half_width, half_width);
            for (double& v : out) v = uniform(engine);
            return;
        }
        case DistributionKind::pareto_symmetrized: {
            // |xi| = scale * U^(-1/alpha), U uniform on (0, 1].
            const double inv_alpha = 1.0 / exponent_;
            for (double& v : out) {
                const std::uint64_t bits = engine();
                const double u = (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
                const double magnitude = pareto_scale_ * std::pow(u, -inv_alpha);
                v = (bits & 1U) ? magnitude : -magnitude;
            }
            return;
        }
    }
}

double CoefficientDistribution::draw(RandomEngine& engine) const {
    double v = 0.0;
    fill(engine, std::span<double>(&v, 1));
    return v;
}

std::vector<double> sample_coefficients(const CoefficientDistribution& dist, int n, const SeedSpec& seed) {
    if (n < 0) throw ParameterError("degree must be non-negative");
    std::vector<double> coeffs(static_cast<std::size_t>(n) + 1);
    RandomEngine engine = make_engine(seed);
    dist.fill(engine, coeffs);
    return coeffs;
}

MomentReport moment_report(const CoefficientDistribution& dist, std::int64_t sample_count, const SeedSpec& seed) {
    if (sample_count < 100) throw ParameterError("moment_report needs at least 100 samples");
    RandomEngine engine = make_engine(seed);
    const double p = 2.0 + dist.epsilon0();
    constexpr std::size_t batch = 4096;
    std::vector<double> buffer(batch);
    long double sum = 0.0L, sum_sq = 0.0L, sum_abs_p = 0.0L;
    std::int64_t remaining = sample_count;
    while (remaining > 0) {
        const auto take = static_cast<std::size_t>(std::min<std::int64_t>(remaining, batch));
        std::span<double> chunk(buffer.data(), take);
        dist.fill(engine, chunk);
        for (double v : chunk) {
            sum += v;
            sum_sq += static_cast<long double>(v) * v;
            sum_abs_p += std::pow(std::fabs(v), p);
        }
        remaining -= static_cast<std::int64_t>(take);
    }
    const auto count = static_cast<long double>(sample_count);
    return MomentReport{static_cast<double>(sum / count), static_cast<double>(sum_sq / count),
                        static_cast<double>(sum_abs_p / count), sample_count};
}

}  // namespace kaclab
