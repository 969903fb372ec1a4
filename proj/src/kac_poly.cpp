#include "kaclab/kac_poly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "kaclab/errors.hpp"

namespace kaclab {

KacPolynomial::KacPolynomial(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) {
    if (coeffs_.empty()) throw ParameterError("a polynomial needs at least one coefficient");
    for (double c : coeffs_) {
        if (!std::isfinite(c)) throw ParameterError("polynomial coefficients must be finite");
    }
}

bool KacPolynomial::is_zero() const noexcept {
    for (double c : coeffs_) {
        if (c != 0.0) return false;
    }
    return true;
}

double KacPolynomial::operator()(double x) const { return evaluate(*this, x); }

Region parse_region(std::string_view name) {
    if (name == "unit+") return Region::unit_pos;
    if (name == "unit-") return Region::unit_neg;
    if (name == "outer+") return Region::outer_pos;
    if (name == "outer-") return Region::outer_neg;
    throw ParameterError("unknown region '" + std::string(name) + "' (expected unit+, unit-, outer+, outer-)");
}

std::string_view region_name(Region r) noexcept {
    switch (r) {
        case Region::unit_pos:
            return "unit+";
        case Region::unit_neg:
            return "unit-";
        case Region::outer_pos:
            return "outer+";
        case Region::outer_neg:
            return "outer-";
    }
    return "?";
}

bool BulkParams::size_condition() const { return m * ell <= std::pow(static_cast<double>(n), 1.0 - beta); }

bool BulkParams::m_condition() const { return m >= std::pow(std::log(static_cast<double>(n)), big_a); }

bool BulkParams::ell_condition() const { return ell >= 3.0 * std::log(static_cast<double>(n)); }

bool BulkParams::interval_nonempty() const { return n > 0 && m > 0.0 && ell > 0.0 && m <= n / ell; }

std::pair<double, double> BulkParams::interval() const {
    if (!interval_nonempty()) throw ParameterError("bulk interval [1-1/m, 1-ell/n] is empty (need m <= n/ell)");
    return {1.0 - 1.0 / m, 1.0 - ell / n};
}

double evaluate(const KacPolynomial& p, double x) {
    const auto c = p.coefficients();
    double s = c.back();
    double err = 0.0;
    for (std::size_t k = c.size() - 1; k-- > 0;) {
        const double prod = s * x;
        const double prod_err = std::fma(s, x, -prod);
        const double sum = prod + c[k];
        const double bv = sum - prod;
        const double sum_err = (prod - (sum - bv)) + (c[k] - bv);
        s = sum;
        err = err * x + (prod_err + sum_err);
    }
    return s + err;
}

KacPolynomial derivative(const KacPolynomial& p, int order) {
    if (order < 0) throw ParameterError("derivative order must be non-negative");
    const int n = p.degree();
    if (order == 0) return p;
    if (order > n) return KacPolynomial({0.0});
    std::vector<double> out(static_cast<std::size_t>(n - order) + 1);
    for (int i = order; i <= n; ++i) {
        double falling = 1.0;
        for (int j = 0; j < order; ++j) falling *= static_cast<double>(i - j);
        out[static_cast<std::size_t>(i - order)] = falling * p[static_cast<std::size_t>(i)];
    }
    return KacPolynomial(std::move(out));
}

namespace {

// sum_{i=0}^{n} e^{i L}, for L = log q with q > 0.
double partial_sum_from_log(int n, double log_q) {
    if (log_q == 0.0) return static_cast<double>(n) + 1.0;
    return std::expm1((static_cast<double>(n) + 1.0) * log_q) / std::expm1(log_q);
}

double partial_sum_direct(int n, double q) {
    return (1.0 - std::pow(q, static_cast<double>(n) + 1.0)) / (1.0 - q);
}

void require_open_unit(double x, const char* what) {
    if (!(std::fabs(x) < 1.0)) throw DomainError(std::string(what) + " must lie in (-1, 1)");
}

}  // namespace

double geometric_partial_sum(int n, double q) {
    if (n < 0) throw ParameterError("degree must be non-negative");
    if (q == 1.0) return static_cast<double>(n) + 1.0;
    if (q == 0.0) return 1.0;
    if (q > 0.5) return partial_sum_from_log(n, std::log(q));
    return partial_sum_direct(n, q);
}

double variance_at(int n, double y) {
    if (n < 0) throw ParameterError("degree must be non-negative");
    const double a = std::fabs(y);
    if (a == 1.0) return static_cast<double>(n) + 1.0;
    if (a == 0.0) return 1.0;
    if (a > 0.7) return partial_sum_from_log(n, 2.0 * std::log(a));
    return partial_sum_direct(n, a * a);
}

double covariance_cn(int n, double x, double y) {
    require_open_unit(x, "x");
    require_open_unit(y, "y");
    const double q = x * y;
    double numerator;
    if (q > 0.49) {
        numerator = partial_sum_from_log(n, std::log(std::fabs(x)) + std::log(std::fabs(y)));
    } else {
        numerator = geometric_partial_sum(n, q);
    }
    const double vx = variance_at(n, x);
    const double vy = variance_at(n, y);
    const double c = numerator / std::sqrt(vx * vy);
    return std::clamp(c, -1.0, 1.0);
}

double g_factor(double x, double y) {
    require_open_unit(x, "x");
    require_open_unit(y, "y");
    const double one_minus_x2 = (1.0 - x) * (1.0 + x);
    const double one_minus_y2 = (1.0 - y) * (1.0 + y);
    return (1.0 - x * y) / std::sqrt(one_minus_x2 * one_minus_y2);
}

double covariance_cn_truncated_form(int n, double x, double y) {
    const double xn = std::pow(x, n);
    const double yn = std::pow(y, n);
    return g_factor(xn, yn) / g_factor(x, y);
}

double sech_limit(double s, double t) {
    const double d = std::fabs(t - s) / 2.0;
    const double e = std::exp(-d);
    return 2.0 * e / (1.0 + e * e);
}

KacPolynomial map_region(const KacPolynomial& p, Region r) {
    std::vector<double> c(p.coefficients().begin(), p.coefficients().end());
    const bool flip = r == Region::unit_neg || r == Region::outer_neg;
    const bool reverse = r == Region::outer_pos || r == Region::outer_neg;
    if (flip) {
        for (std::size_t i = 1; i < c.size(); i += 2) c[i] = -c[i];
    }
    if (reverse) std::reverse(c.begin(), c.end());
    return KacPolynomial(std::move(c));
}

void write_polynomial_csv(std::ostream& out, const KacPolynomial& p) {
    out << "i,coeff\n";
    char buf[64];
    const auto c = p.coefficients();
    for (std::size_t i = 0; i < c.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, c[i]);
        out << buf;
    }
}

KacPolynomial read_polynomial_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("i,coeff", 0) != 0) {
        throw ParameterError("polynomial CSV must start with header 'i,coeff'");
    }
    std::vector<double> coeffs;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParameterError("polynomial CSV line " + std::to_string(line_no) + ": expected 'i,coeff'");
        }
        try {
            const std::size_t index = std::stoul(line.substr(0, comma));
            const double value = std::stod(line.substr(comma + 1));
            if (index != coeffs.size()) {
                throw ParameterError("polynomial CSV line " + std::to_string(line_no) + ": index out of order");
            }
            coeffs.push_back(value);
        } catch (const std::logic_error& e) {
            if (dynamic_cast<const ParameterError*>(&e)) throw;
            throw ParameterError("polynomial CSV line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return KacPolynomial(std::move(coeffs));
}

}  // namespace kaclab
