#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "kaclab/coeff_sampling.hpp"

namespace kaclab {

/// Sampling abscissae of the limiting process.
struct ProcessGrid {
    std::vector<double> points;
    /// Common spacing for uniform grids, 0 otherwise.
    double step = 0.0;

    /// start, start + step, ..., up to end (inclusive within rounding).
    static ProcessGrid uniform(double start, double end, double step);
    /// Arbitrary strictly increasing points.
    static ProcessGrid irregular(std::vector<double> points);

    std::size_t size() const noexcept { return points.size(); }
};

enum class SamplerKind { covariance_factor, kernel_discretized };

std::string_view sampler_name(SamplerKind kind) noexcept;

struct ProcessSample {
    ProcessGrid grid;
    std::vector<double> values;
    SeedSpec seed;
    SamplerKind sampler = SamplerKind::covariance_factor;
};

/// Covariance of the limiting process: sech((t - s) / 2).
double cov_Z(double s, double t);

/// sech(pi lambda).
double spectral_density(double lambda);

/// Draws exact-in-law paths from a lower Cholesky factor of the covariance
/// matrix, computed once. Diagonal jitter escalates through 1e-14, 1e-12,
/// 1e-10 when the plain factorization fails; beyond that NumericError.
class CovarianceSampler {
public:
    static constexpr std::size_t max_points = 10000;

    explicit CovarianceSampler(ProcessGrid grid);

    const ProcessGrid& grid() const noexcept { return grid_; }
    double jitter() const noexcept { return jitter_; }

    void draw(RandomEngine& engine, std::span<double> out) const;

private:
    ProcessGrid grid_;
    Eigen::MatrixXd factor_;
    double jitter_ = 0.0;
};

/// Riemann-Ito discretization of Z_t = sqrt(2) e^{-t/2} int_0^inf h_t(u) dB_u
/// with h_t(u) = exp(-e^{-t} u): midpoint weights on a uniform u-grid of step
/// du up to u_max, shared Brownian increments across all t.
class KernelSampler {
public:
    /// Throws ParameterError unless e^{-t} du <= 1e-2 and u_max >= 20 e^t on
    /// the grid, and NumericError if a discretized marginal variance is more
    /// than 1e-3 away from 1.
    KernelSampler(ProcessGrid grid, double du, double u_max);

    const ProcessGrid& grid() const noexcept { return grid_; }
    /// Exact variance of the discretized Z_t at each grid point.
    const std::vector<double>& discretized_variance() const noexcept { return variance_; }
    std::size_t increments() const noexcept { return increments_; }

    void draw(RandomEngine& engine, std::span<double> out) const;

    /// Smallest admissible (du, u_max) for a grid.
    static std::pair<double, double> default_resolution(const ProcessGrid& grid);

private:
    ProcessGrid grid_;
    double du_;
    std::size_t increments_;
    std::vector<double> ratio_;  // e^{-e^{-t} du}
    std::vector<double> scale_;  // sqrt(2) e^{-t/2} sqrt(du) e^{-e^{-t} du / 2}
    std::vector<double> variance_;
};

ProcessSample sample_path_covariance(const ProcessGrid& grid, const SeedSpec& seed);
ProcessSample sample_path_kernel(const ProcessGrid& grid, const SeedSpec& seed, double du, double u_max);

/// Expected zeros of Z on [a, b]: (b - a) / (2 pi).
double expected_zeros(double a, double b);

struct DerivativeMoments {
    double var_Z1 = 0.0;  ///< -r''(0)
    double var_Z2 = 0.0;  ///< r''''(0)
};

/// Derivative variances from the Taylor series of sech(t/2) (Euler numbers).
DerivativeMoments derivative_moments();

/// Sign changes between consecutive samples.
int count_zero_crossings(std::span<const double> values);

}  // namespace kaclab
