#include "kaclab/sign_compare.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "kaclab/errors.hpp"
#include "kaclab/parallel.hpp"

namespace kaclab {

std::vector<double> normalized_kac_values(const KacPolynomial& p, const PartitionSpec& spec) {
    if (spec.n != p.degree()) throw ParameterError("partition was built for a different degree");
    std::vector<double> out;
    out.reserve(spec.x.size());
    for (double x : spec.x) out.push_back(evaluate(p, x) / std::sqrt(variance_at(p.degree(), x)));
    return out;
}

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw ParameterError("symmetric_eigen needs a square matrix");
    const Eigen::Index n = m.rows();
    Eigen::MatrixXd a = 0.5 * (m + m.transpose());
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    const double total = a.squaredNorm();
    auto off_mass = [&] {
        double sum = 0.0;
        for (Eigen::Index j = 1; j < n; ++j) sum += a.col(j).head(j).squaredNorm();
        return 2.0 * sum;
    };
    const double threshold = 1e-13 * 1e-13 * total;
    bool converged = off_mass() <= threshold;
    for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
        converged = off_mass() <= threshold;
    }
    if (!converged) throw NumericError("Jacobi eigensolver did not converge in 100 sweeps");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
    SymmetricEigen out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
        out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
    }
    return out;
}

Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw ParameterError("matrix_sqrt_psd needs a square matrix");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw ParameterError("matrix_sqrt_psd needs a symmetric matrix (asymmetry above 1e-12)");
    }
    if (m.rows() == 0) return m;
    const auto eig = symmetric_eigen(m);
    if (eig.values(0) < -1e-10) throw ParameterError("matrix_sqrt_psd needs eigenvalues >= -1e-10");
    const Eigen::VectorXd root = eig.values.cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd out = eig.vectors * root.asDiagonal() * eig.vectors.transpose();
    return 0.5 * (out + out.transpose());
}

MatrixNorms norms(const Eigen::MatrixXd& m) {
    MatrixNorms out;
    if (m.size() == 0) return out;
    out.frobenius = m.norm();
    const bool symmetric = m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + out.frobenius);
    if (symmetric) {
        out.nuclear = symmetric_eigen(m).values.cwiseAbs().sum();
    } else {
        out.nuclear = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues().sum();
    }
    return out;
}

PowersStormerMargin powers_stormer_margin(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ParameterError("Powers-Stormer needs equal shapes");
    PowersStormerMargin out;
    out.lhs = (matrix_sqrt_psd(a) - matrix_sqrt_psd(b)).squaredNorm();
    out.rhs = norms(a - b).nuclear;
    out.holds = out.lhs <= out.rhs + 1e-8;
    return out;
}

PowersStormerMargin powers_stormer_margin(const CovariancePair& pair) { return powers_stormer_margin(pair.a, pair.b); }

CovariancePair build_covariance_pair(int n, const PartitionSpec& spec) {
    if (spec.n != n) throw ParameterError("partition was built for a different degree");
    if (spec.x.empty()) throw ParameterError("partition has no points");
    const auto dim = static_cast<Eigen::Index>(spec.x.size());
    CovariancePair pair;
    pair.dimension = static_cast<int>(dim);
    pair.grid = spec;
    pair.a.resize(dim, dim);
    pair.b.resize(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        pair.a(i, i) = 1.0;
        pair.b(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
            const double a = sech_limit(spec.s[ui], spec.s[uj]);
            const double b = covariance_cn(n, spec.x[ui], spec.x[uj]);
            pair.a(i, j) = pair.a(j, i) = a;
            pair.b(i, j) = pair.b(j, i) = b;
            pair.max_entry_gap = std::max(pair.max_entry_gap, std::fabs(a - b));
        }
    }
    for (const Eigen::MatrixXd* m : {&pair.a, &pair.b}) {
        if (symmetric_eigen(*m).values(0) < -1e-10) {
            throw NumericError("covariance matrix is not PSD within 1e-10");
        }
    }
    return pair;
}

namespace {

bool patterns_differ(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        const bool cx = x(i) * x(i + 1) < 0.0;
        const bool cy = y(i) * y(i + 1) < 0.0;
        if (cx != cy) return true;
    }
    return false;
}

}  // namespace

double coupled_sign_change_discrepancy(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int draws,
                                       const SeedSpec& seed, int threads) {
    if (draws < 1000) throw ParameterError("coupled discrepancy needs at least 1000 draws");
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ParameterError("coupled discrepancy needs equal shapes");
    const Eigen::MatrixXd ra = matrix_sqrt_psd(a);
    const Eigen::MatrixXd rb = matrix_sqrt_psd(b);
    const Eigen::Index dim = a.rows();
    std::vector<unsigned char> differs(static_cast<std::size_t>(draws), 0);
    parallel_for(static_cast<std::size_t>(draws), resolve_threads(threads), [&](std::size_t i) {
        auto engine = make_engine(seed.child(i));
        std::normal_distribution<double> normal;
        Eigen::VectorXd w(dim);
        for (Eigen::Index k = 0; k < dim; ++k) w(k) = normal(engine);
        differs[i] = patterns_differ(ra * w, rb * w) ? 1 : 0;
    });
    const auto hits = std::count(differs.begin(), differs.end(), 1);
    return static_cast<double>(hits) / draws;
}

double coupled_sign_change_discrepancy(const CovariancePair& pair, int draws, const SeedSpec& seed, int threads) {
    return coupled_sign_change_discrepancy(pair.a, pair.b, draws, seed, threads);
}

}  // namespace kaclab
