#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "kaclab/errors.hpp"
#include "kaclab/sign_compare.hpp"
#include "oracles.hpp"

using namespace kaclab;

namespace {

Eigen::MatrixXd random_psd(int dim, std::mt19937_64& rng, int rank) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd x(dim, rank);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < rank; ++j) x(i, j) = g(rng);
    return x * x.transpose() / rank;
}

// Square root and nuclear norm through Eigen's own symmetric solver.
Eigen::MatrixXd eigen_sqrt(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

TEST_CASE("Jacobi eigen-decomposition matches Eigen") {
    std::mt19937_64 rng(3);
    for (int dim : {1, 2, 7, 30}) {
        const Eigen::MatrixXd m = random_psd(dim, rng, dim) - Eigen::MatrixXd::Identity(dim, dim) * 0.3;
        const auto mine = symmetric_eigen(m);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(m);
        CHECK((mine.values - ref.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
        const Eigen::MatrixXd rebuilt = mine.vectors * mine.values.asDiagonal() * mine.vectors.transpose();
        CHECK((rebuilt - m).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("PSD square root") {
    std::mt19937_64 rng(4);
    const Eigen::MatrixXd m = random_psd(12, rng, 5);  // rank deficient
    const Eigen::MatrixXd r = matrix_sqrt_psd(m);
    CHECK((r * r - m).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((r - eigen_sqrt(m)).cwiseAbs().maxCoeff() < 1e-6);
    Eigen::MatrixXd asym = m;
    asym(0, 1) += 1e-6;
    CHECK_THROWS_AS(matrix_sqrt_psd(asym), ParameterError);
    CHECK_THROWS_AS(matrix_sqrt_psd(-Eigen::MatrixXd::Identity(3, 3)), ParameterError);
}

TEST_CASE("norms") {
    Eigen::MatrixXd m(2, 2);
    m << 3, 0, 0, -4;
    CHECK(norms(m).frobenius == doctest::Approx(5.0));
    CHECK(norms(m).nuclear == doctest::Approx(7.0));
    Eigen::MatrixXd rect(2, 3);
    rect << 1, 2, 3, 4, 5, 6;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rect);
    CHECK(norms(rect).nuclear == doctest::Approx(svd.singularValues().sum()));
}

TEST_CASE("Powers-Stormer inequality on random PSD pairs") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 60; ++k) {
        const int dim = 1 + k % 20;
        const auto a = random_psd(dim, rng, 1 + k % 7);
        const auto b = random_psd(dim, rng, 1 + (k / 3) % 7);
        const auto ps = powers_stormer_margin(a, b);
        CHECK(ps.holds);
        CHECK(ps.lhs <= ps.rhs + 1e-8);
        const double lhs = (eigen_sqrt(a) - eigen_sqrt(b)).squaredNorm();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a - b);
        CHECK(ps.lhs == doctest::Approx(lhs).epsilon(1e-6));
        CHECK(ps.rhs == doctest::Approx(es.eigenvalues().cwiseAbs().sum()).epsilon(1e-9));
    }
}

TEST_CASE("covariance pair entries") {
    const int n = 10000;
    const auto spec = make_partition(n, 30.0, 3 * std::log(n));
    const auto pair = build_covariance_pair(n, spec);
    REQUIRE(pair.dimension == static_cast<int>(spec.s.size()));
    double gap = 0;
    for (int i = 0; i < pair.dimension; ++i) {
        for (int j = 0; j < pair.dimension; ++j) {
            const double xi = spec.x[static_cast<std::size_t>(i)], xj = spec.x[static_cast<std::size_t>(j)];
            const double si = spec.s[static_cast<std::size_t>(i)], sj = spec.s[static_cast<std::size_t>(j)];
            CHECK(pair.a(i, j) == doctest::Approx(static_cast<double>(oracle::sech_half(si - sj))).epsilon(1e-12));
            CHECK(pair.b(i, j) == doctest::Approx(static_cast<double>(oracle::covariance(n, xi, xj))).epsilon(1e-10));
            gap = std::max(gap, std::fabs(pair.a(i, j) - pair.b(i, j)));
        }
    }
    CHECK(pair.max_entry_gap == doctest::Approx(gap).epsilon(1e-8));
}

TEST_CASE("normalized values have unit variance") {
    const int n = 2000;
    const auto spec = make_partition(n, 10.0, 3 * std::log(n));
    double sum_sq = 0;
    const int samples = 4000;
    for (int k = 0; k < samples; ++k) {
        const KacPolynomial p(sample_coefficients(CoefficientDistribution::gaussian(), n, SeedSpec{12, 0}.child(k)));
        sum_sq += normalized_kac_values(p, spec)[0] * normalized_kac_values(p, spec)[0];
    }
    CHECK(sum_sq / samples == doctest::Approx(1.0).epsilon(0.08));
}

TEST_CASE("coupled discrepancy is thread-count invariant and vanishes for equal matrices") {
    const int n = 10000;
    const auto pair = build_covariance_pair(n, make_partition(n, 10.0, 3 * std::log(n)));
    const double one = coupled_sign_change_discrepancy(pair, 2000, {1, 0}, 1);
    const double four = coupled_sign_change_discrepancy(pair, 2000, {1, 0}, 4);
    CHECK(one == four);
    CHECK(coupled_sign_change_discrepancy(pair.a, pair.a, 2000, {1, 0}, 1) == 0.0);
    CHECK_THROWS_AS(coupled_sign_change_discrepancy(pair, 10, {1, 0}, 1), ParameterError);
}
