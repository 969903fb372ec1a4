#include "kaclab/limit_process.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "kaclab/errors.hpp"
#include "kaclab/kac_poly.hpp"
#include "kaclab/root_count.hpp"

namespace kaclab {

ProcessGrid ProcessGrid::uniform(double start, double end, double step) {
    if (!std::isfinite(start) || !std::isfinite(end) || !(step > 0.0) || !(end >= start)) {
        throw ParameterError("process grid needs finite start <= end and step > 0");
    }
    const double span = (end - start) / step;
    if (span > 1e7) throw ParameterError("process grid has too many points");
    const auto last = static_cast<std::size_t>(std::floor(span + 1e-9));
    ProcessGrid grid;
    grid.step = step;
    grid.points.resize(last + 1);
    for (std::size_t k = 0; k <= last; ++k) grid.points[k] = start + static_cast<double>(k) * step;
    return grid;
}

ProcessGrid ProcessGrid::irregular(std::vector<double> points) {
    if (points.empty()) throw ParameterError("process grid needs at least one point");
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (!std::isfinite(points[k])) throw ParameterError("process grid points must be finite");
        if (k > 0 && !(points[k] > points[k - 1])) throw ParameterError("process grid must be strictly increasing");
    }
    ProcessGrid grid;
    grid.points = std::move(points);
    return grid;
}

std::string_view sampler_name(SamplerKind kind) noexcept {
    return kind == SamplerKind::covariance_factor ? "cov" : "kernel";
}

double cov_Z(double s, double t) { return sech_limit(s, t); }

double spectral_density(double lambda) {
    const double e = std::exp(-std::numbers::pi * std::fabs(lambda));
    return 2.0 * e / (1.0 + e * e);
}

CovarianceSampler::CovarianceSampler(ProcessGrid grid) : grid_(std::move(grid)) {
    const auto n = static_cast<Eigen::Index>(grid_.size());
    if (n == 0) throw ParameterError("process grid needs at least one point");
    if (grid_.size() > max_points) throw ParameterError("covariance sampler supports at most 10^4 grid points");
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double c = cov_Z(grid_.points[static_cast<std::size_t>(i)], grid_.points[static_cast<std::size_t>(j)]);
            cov(i, j) = c;
            cov(j, i) = c;
        }
    }
    for (double jitter : {0.0, 1e-14, 1e-12, 1e-10}) {
        Eigen::MatrixXd trial = cov;
        trial.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(trial);
        if (llt.info() == Eigen::Success) {
            factor_ = llt.matrixL();
            jitter_ = jitter;
            return;
        }
    }
    throw NumericError("sech covariance factorization failed with jitter up to 1e-10");
}

void CovarianceSampler::draw(RandomEngine& engine, std::span<double> out) const {
    const auto n = factor_.rows();
    if (out.size() != static_cast<std::size_t>(n)) throw ParameterError("output length must match the grid");
    std::normal_distribution<double> normal;
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = normal(engine);
    Eigen::Map<Eigen::VectorXd>(out.data(), n).noalias() = factor_.triangularView<Eigen::Lower>() * w;
}

std::pair<double, double> KernelSampler::default_resolution(const ProcessGrid& grid) {
    if (grid.points.empty()) throw ParameterError("process grid needs at least one point");
    const double t_min = grid.points.front();
    const double t_max = grid.points.back();
    return {1e-2 * std::exp(t_min), 20.0 * std::exp(t_max)};
}

KernelSampler::KernelSampler(ProcessGrid grid, double du, double u_max) : grid_(std::move(grid)), du_(du) {
    if (grid_.points.empty()) throw ParameterError("process grid needs at least one point");
    if (!(du > 0.0) || !(u_max > du)) throw ParameterError("kernel sampler needs 0 < du < u_max");
    const double t_min = grid_.points.front();
    const double t_max = grid_.points.back();
    if (std::exp(-t_min) * du > 1e-2 * (1.0 + 1e-12)) {
        throw ParameterError("kernel sampler needs e^{-t} du <= 1e-2 on the grid");
    }
    if (u_max < 20.0 * std::exp(t_max) * (1.0 - 1e-12)) {
        throw ParameterError("kernel sampler needs u_max >= 20 e^{max t}");
    }
    if (u_max / du > 1e8) throw ParameterError("kernel sampler needs at most 1e8 increments (grid too long)");
    increments_ = static_cast<std::size_t>(std::ceil(u_max / du - 1e-9));
    for (double t : grid_.points) {
        const double a = std::exp(-t) * du;
        ratio_.push_back(std::exp(-a));
        scale_.push_back(std::numbers::sqrt2 * std::exp(-t / 2.0) * std::sqrt(du) * std::exp(-a / 2.0));
        // 2 e^{-t} du sum_{j<J} e^{-a(2j+1)} in closed form
        const double full = a / std::sinh(a);
        const double truncation = -std::expm1(-2.0 * a * static_cast<double>(increments_));
        variance_.push_back(full * truncation);
    }
    for (double v : variance_) {
        if (std::fabs(v - 1.0) > 1e-3) {
            throw NumericError("kernel discretization variance deviates from 1 by more than 1e-3");
        }
    }
}

void KernelSampler::draw(RandomEngine& engine, std::span<double> out) const {
    const std::size_t n = grid_.size();
    if (out.size() != n) throw ParameterError("output length must match the grid");
    std::normal_distribution<double> normal;
    std::vector<double> weight(n, 1.0);
    std::vector<double> acc(n, 0.0);
    for (std::size_t j = 0; j < increments_; ++j) {
        const double z = normal(engine);
        for (std::size_t k = 0; k < n; ++k) {
            acc[k] += weight[k] * z;
            weight[k] *= ratio_[k];
        }
    }
    for (std::size_t k = 0; k < n; ++k) out[k] = scale_[k] * acc[k];
}

ProcessSample sample_path_covariance(const ProcessGrid& grid, const SeedSpec& seed) {
    CovarianceSampler sampler(grid);
    ProcessSample sample{grid, std::vector<double>(grid.size()), seed, SamplerKind::covariance_factor};
    auto engine = make_engine(seed);
    sampler.draw(engine, sample.values);
    return sample;
}

ProcessSample sample_path_kernel(const ProcessGrid& grid, const SeedSpec& seed, double du, double u_max) {
    KernelSampler sampler(grid, du, u_max);
    ProcessSample sample{grid, std::vector<double>(grid.size()), seed, SamplerKind::kernel_discretized};
    auto engine = make_engine(seed);
    sampler.draw(engine, sample.values);
    return sample;
}

double expected_zeros(double a, double b) {
    if (!(a <= b)) throw ParameterError("expected_zeros needs a <= b");
    return (b - a) / (2.0 * std::numbers::pi);
}

DerivativeMoments derivative_moments() {
    // Euler numbers E_0, E_2, E_4 from sum_{k=0}^{m} C(2m, 2k) E_{2k} = 0.
    std::vector<double> euler{1.0};
    for (int m = 1; m <= 2; ++m) {
        double sum = 0.0;
        for (int k = 0; k < m; ++k) {
            double binom = 1.0;
            for (int j = 0; j < 2 * k; ++j) binom = binom * (2 * m - j) / (j + 1);
            sum += binom * euler[static_cast<std::size_t>(k)];
        }
        euler.push_back(-sum);
    }
    // sech(t/2) = sum_k E_{2k} t^{2k} / (4^k (2k)!), so r^{(2k)}(0) = E_{2k} / 4^k.
    DerivativeMoments out;
    out.var_Z1 = -euler[1] / 4.0;
    out.var_Z2 = euler[2] / 16.0;
    if (!(out.var_Z2 <= 1.5)) throw NumericError("second-derivative variance exceeds 3/2");
    return out;
}

int count_zero_crossings(std::span<const double> values) { return count_sign_changes(values); }

}  // namespace kaclab
