#pragma once

#include <vector>

#include <Eigen/Dense>

#include "kaclab/coeff_sampling.hpp"
#include "kaclab/kac_poly.hpp"
#include "kaclab/root_count.hpp"

namespace kaclab {

/// g_n(s_k) = f_n(x_k) / sqrt(V(x_k)) at the partition points.
std::vector<double> normalized_kac_values(const KacPolynomial& p, const PartitionSpec& spec);

/// Covariances of the limiting vector (A, sech kernel) and of the normalized
/// Kac vector (B, exact c_n) on the same log grid.
struct CovariancePair {
    int dimension = 0;
    Eigen::MatrixXd a;
    Eigen::MatrixXd b;
    PartitionSpec grid;
    double max_entry_gap = 0.0;
};

/// Throws NumericError if either matrix has an eigenvalue below -1e-10.
CovariancePair build_covariance_pair(int n, const PartitionSpec& spec);

struct SymmetricEigen {
    Eigen::VectorXd values;   ///< ascending
    Eigen::MatrixXd vectors;  ///< columns
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius mass is below
/// 1e-13 times the total; at most 100 sweeps, then NumericError.
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& m);

/// PSD square root through symmetric_eigen, eigenvalues clamped at 0.
/// ParameterError if the input is asymmetric beyond 1e-12 or has an
/// eigenvalue below -1e-10.
Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& m);

struct MatrixNorms {
    double frobenius = 0.0;
    double nuclear = 0.0;
};

/// Frobenius and nuclear norms; the nuclear norm of a symmetric matrix is the
/// sum of absolute eigenvalues, otherwise the sum of singular values.
MatrixNorms norms(const Eigen::MatrixXd& m);

struct PowersStormerMargin {
    double lhs = 0.0;  ///< ||A^{1/2} - B^{1/2}||_F^2
    double rhs = 0.0;  ///< ||A - B||_nuclear
    bool holds = false;
};

PowersStormerMargin powers_stormer_margin(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
PowersStormerMargin powers_stormer_margin(const CovariancePair& pair);

/// Probability, over `draws` shared standard normal vectors W, that the
/// adjacent sign-change patterns of A^{1/2} W and B^{1/2} W differ anywhere.
/// Needs draws >= 1000. Deterministic in (seed, draws) for any thread count.
double coupled_sign_change_discrepancy(const CovariancePair& pair, int draws, const SeedSpec& seed, int threads = 1);
double coupled_sign_change_discrepancy(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int draws,
                                       const SeedSpec& seed, int threads = 1);

}  // namespace kaclab
