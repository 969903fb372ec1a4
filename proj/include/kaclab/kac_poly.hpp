#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kaclab {

/// f(x) = sum_i c_i x^i with coefficients c_0..c_n. The degree is the
/// storage length minus one; trailing zero coefficients are kept, because the
/// region maps depend on the nominal degree.
class KacPolynomial {
public:
    KacPolynomial() : coeffs_{0.0} {}
    explicit KacPolynomial(std::vector<double> coefficients);

    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    std::span<const double> coefficients() const noexcept { return coeffs_; }
    double operator[](std::size_t i) const { return coeffs_[i]; }
    bool is_zero() const noexcept;

    double operator()(double x) const;

    friend bool operator==(const KacPolynomial&, const KacPolynomial&) = default;

private:
    std::vector<double> coeffs_;
};

enum class Region { unit_pos, unit_neg, outer_pos, outer_neg };

inline constexpr Region all_regions[] = {Region::unit_pos, Region::unit_neg, Region::outer_pos, Region::outer_neg};

/// CLI names: unit+, unit-, outer+, outer-.
Region parse_region(std::string_view name);
std::string_view region_name(Region r) noexcept;

/// Bulk interval parameters (n, m, ell) with the growth exponents beta and A.
struct BulkParams {
    int n = 0;
    double m = 2.0;
    double ell = 1.0;
    double beta = 0.1;
    double big_a = 1.0;

    bool size_condition() const;     ///< m * ell <= n^(1 - beta)
    bool m_condition() const;        ///< m >= (log n)^A
    bool ell_condition() const;      ///< ell >= 3 log n
    bool valid() const { return size_condition() && m_condition() && ell_condition(); }
    bool interval_nonempty() const;  ///< m <= n / ell

    /// [1 - 1/m, 1 - ell/n]; throws when empty.
    std::pair<double, double> interval() const;
};

/// Compensated Horner evaluation (error-free transformations); the result is
/// as accurate as if computed in twice the working precision.
double evaluate(const KacPolynomial& p, double x);

/// Exact k-th derivative; order > degree gives the zero polynomial.
KacPolynomial derivative(const KacPolynomial& p, int order);

/// V(y) = sum_{i=0}^n y^(2i), the variance of f_n(y) for unit-variance coefficients.
double variance_at(int n, double y);

/// sum_{i=0}^n q^i, stable for q close to 1.
double geometric_partial_sum(int n, double q);

/// Exact normalized covariance of f_n(x), f_n(y) for x, y in (-1, 1).
double covariance_cn(int n, double x, double y);

/// The same quantity in the closed form G(x^n, y^n) / G(x, y), which drops
/// one power against the exact sum; kept for comparison only.
double covariance_cn_truncated_form(int n, double x, double y);

/// G(x, y) = (1 - xy) / sqrt((1 - x^2)(1 - y^2)).
double g_factor(double x, double y);

/// sech((t - s) / 2).
double sech_limit(double s, double t);

/// Polynomial whose roots in [0, 1] correspond to the roots of p in region r:
/// x -> -x flips odd coefficients, x -> 1/x reverses them.
KacPolynomial map_region(const KacPolynomial& p, Region r);

/// CSV with header `i,coeff`.
void write_polynomial_csv(std::ostream& out, const KacPolynomial& p);
KacPolynomial read_polynomial_csv(std::istream& in);

}  // namespace kaclab
