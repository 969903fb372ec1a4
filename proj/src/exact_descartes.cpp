#include "exact_descartes.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "kaclab/errors.hpp"

namespace kaclab::detail {

namespace {

using Poly = std::vector<mpz_class>;

struct Dyadic {
    mpz_class mantissa;  // value = mantissa * 2^exponent
    long exponent = 0;
};

Dyadic to_dyadic(double x) {
    Dyadic d;
    if (x == 0.0) return d;
    int e = 0;
    const double m = std::frexp(x, &e);
    d.mantissa = mpz_class(std::ldexp(m, 53));
    d.exponent = static_cast<long>(e) - 53;
    const mp_bitcnt_t tz = mpz_scan1(d.mantissa.get_mpz_t(), 0);
    if (tz > 0) {
        mpz_fdiv_q_2exp(d.mantissa.get_mpz_t(), d.mantissa.get_mpz_t(), tz);
        d.exponent += static_cast<long>(tz);
    }
    return d;
}

void trim(Poly& p) {
    while (p.size() > 1 && p.back() == 0) p.pop_back();
}

bool is_zero(const Poly& p) { return p.size() == 1 && p[0] == 0; }

// Integer polynomial proportional (by a positive power of two) to the input.
Poly to_integer_poly(std::span<const double> coeffs) {
    std::vector<Dyadic> parts;
    parts.reserve(coeffs.size());
    long min_exp = std::numeric_limits<long>::max();
    for (double c : coeffs) {
        parts.push_back(to_dyadic(c));
        if (c != 0.0) min_exp = std::min(min_exp, parts.back().exponent);
    }
    Poly out(coeffs.size());
    if (min_exp == std::numeric_limits<long>::max()) return Poly{0};
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i].mantissa == 0) continue;
        mpz_mul_2exp(out[i].get_mpz_t(), parts[i].mantissa.get_mpz_t(),
                     static_cast<mp_bitcnt_t>(parts[i].exponent - min_exp));
    }
    trim(out);
    return out;
}

int sign_variations(const Poly& q) {
    int count = 0;
    int last = 0;
    for (const auto& c : q) {
        const int s = sgn(c);
        if (s == 0) continue;
        if (last != 0 && s != last) ++count;
        last = s;
    }
    return count;
}

// q(y) -> q(y + 1).
void taylor_shift_one(Poly& q) {
    const std::size_t n = q.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = n - 1;; --j) {
            q[j] += q[j + 1];
            if (j == i) break;
        }
    }
}

// q(y) -> q(y + a).
void taylor_shift(Poly& q, const mpz_class& a) {
    if (a == 0) return;
    const std::size_t n = q.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = n - 1;; --j) {
            q[j] += a * q[j + 1];
            if (j == i) break;
        }
    }
}

// Upper bound (same parity) on the roots of q in (0, 1).
int descartes_bound_unit(const Poly& q) {
    Poly r(q.rbegin(), q.rend());
    taylor_shift_one(r);
    return sign_variations(r);
}

void remove_power_of_two(Poly& q) {
    mp_bitcnt_t shift = std::numeric_limits<mp_bitcnt_t>::max();
    for (const auto& c : q) {
        if (c != 0) shift = std::min(shift, mpz_scan1(c.get_mpz_t(), 0));
    }
    if (shift == 0 || shift == std::numeric_limits<mp_bitcnt_t>::max()) return;
    for (auto& c : q) mpz_fdiv_q_2exp(c.get_mpz_t(), c.get_mpz_t(), shift);
}

// 2^d q(y / 2).
Poly halve(const Poly& q) {
    const std::size_t d = q.size() - 1;
    Poly out(q.size());
    for (std::size_t i = 0; i <= d; ++i) mpz_mul_2exp(out[i].get_mpz_t(), q[i].get_mpz_t(), d - i);
    return out;
}

mpz_class content(const Poly& p) {
    mpz_class g = 0;
    for (const auto& c : p) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
        if (g == 1) break;
    }
    return g;
}

Poly primitive_part(Poly p) {
    trim(p);
    mpz_class g = content(p);
    if (g == 0) return Poly{0};
    if (p.back() < 0) g = -g;
    for (auto& c : p) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
    return p;
}

Poly derivative_of(const Poly& p) {
    if (p.size() <= 1) return Poly{0};
    Poly d(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<unsigned long>(i);
    return d;
}

// lc(b)^k a = quotient * b + remainder, deg remainder < deg b.
void pseudo_divide(const Poly& a, const Poly& b, Poly* quotient, Poly& remainder) {
    remainder = a;
    trim(remainder);
    const std::size_t db = b.size() - 1;
    if (quotient) quotient->assign(remainder.size() >= b.size() ? remainder.size() - db : 1, 0);
    const mpz_class& lb = b.back();
    while (!is_zero(remainder) && remainder.size() >= b.size()) {
        const std::size_t shift = remainder.size() - b.size();
        const mpz_class lr = remainder.back();
        for (auto& c : remainder) c *= lb;
        for (std::size_t i = 0; i <= db; ++i) remainder[i + shift] -= lr * b[i];
        if (quotient) {
            for (auto& c : *quotient) c *= lb;
            (*quotient)[shift] += lr;
        }
        remainder.pop_back();
        trim(remainder);
    }
}

Poly polynomial_gcd(Poly a, Poly b) {
    a = primitive_part(std::move(a));
    b = primitive_part(std::move(b));
    if (a.size() < b.size()) std::swap(a, b);
    while (!is_zero(b)) {
        Poly r;
        pseudo_divide(a, b, nullptr, r);
        a = std::move(b);
        b = is_zero(r) ? Poly{0} : primitive_part(std::move(r));
    }
    return a;
}

Poly square_free_part(const Poly& p) {
    const Poly g = polynomial_gcd(p, derivative_of(p));
    if (g.size() <= 1) return p;
    Poly q, r;
    pseudo_divide(p, g, &q, r);
    return primitive_part(std::move(q));
}

// Sum of A_i x^i for x = X 2^t, scaled by a positive power of two.
int homogeneous_sign(const Poly& a, const Dyadic& x) {
    if (x.mantissa == 0) return sgn(a[0]);
    const std::size_t n = a.size() - 1;
    if (x.exponent >= 0) {
        mpz_class xv;
        mpz_mul_2exp(xv.get_mpz_t(), x.mantissa.get_mpz_t(), static_cast<mp_bitcnt_t>(x.exponent));
        mpz_class acc = a[n];
        for (std::size_t i = n; i-- > 0;) acc = acc * xv + a[i];
        return sgn(acc);
    }
    const auto shift = static_cast<mp_bitcnt_t>(-x.exponent);
    mpz_class acc = a[n];
    mpz_class term;
    for (std::size_t i = n; i-- > 0;) {
        acc *= x.mantissa;
        mpz_mul_2exp(term.get_mpz_t(), a[i].get_mpz_t(), shift * (n - i));
        acc += term;
    }
    return sgn(acc);
}

double round_down(const mpq_class& q) {
    double d = q.get_d();
    if (mpq_class(d) > q) d = std::nextafter(d, -std::numeric_limits<double>::infinity());
    return d;
}

double round_up(const mpq_class& q) {
    double d = q.get_d();
    if (mpq_class(d) < q) d = std::nextafter(d, std::numeric_limits<double>::infinity());
    return d;
}

struct Node {
    Poly q;
    int depth;
    mpz_class index;  // cell (index / 2^depth, (index + 1) / 2^depth) in y
};

}  // namespace

int exact_sign(std::span<const double> coeffs, double x) {
    const Poly a = to_integer_poly(coeffs);
    return homogeneous_sign(a, to_dyadic(x));
}

namespace {

ExactCount count_integer_poly(const Poly& a, double lo, double hi, int depth_budget) {
    ExactCount out;
    if (a.size() == 1) return out;
    const std::size_t n = a.size() - 1;

    // x = (L + W y) 2^t maps y in (0, 1) onto (lo, hi).
    Dyadic dlo = to_dyadic(lo);
    Dyadic dhi = to_dyadic(hi);
    long t = std::min(lo == 0.0 ? dhi.exponent : dlo.exponent, hi == 0.0 ? dlo.exponent : dhi.exponent);
    mpz_class big_l, big_h;
    mpz_mul_2exp(big_l.get_mpz_t(), dlo.mantissa.get_mpz_t(), static_cast<mp_bitcnt_t>(dlo.exponent - t));
    mpz_mul_2exp(big_h.get_mpz_t(), dhi.mantissa.get_mpz_t(), static_cast<mp_bitcnt_t>(dhi.exponent - t));
    if (lo == 0.0) big_l = 0;
    if (hi == 0.0) big_h = 0;
    if (t > 0) {
        big_l <<= static_cast<mp_bitcnt_t>(t);
        big_h <<= static_cast<mp_bitcnt_t>(t);
        t = 0;
    }
    const mpz_class width = big_h - big_l;

    Poly q(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        mpz_mul_2exp(q[i].get_mpz_t(), a[i].get_mpz_t(), static_cast<mp_bitcnt_t>(-t) * (n - i));
    }
    taylor_shift(q, big_l);
    mpz_class w_power = 1;
    for (std::size_t k = 0; k <= n; ++k) {
        q[k] *= w_power;
        w_power *= width;
    }
    remove_power_of_two(q);

    const mpq_class scale = [&] {
        mpq_class s(1);
        mpq_div_2exp(s.get_mpq_t(), s.get_mpq_t(), static_cast<mp_bitcnt_t>(-t));
        return s;
    }();
    const mpq_class x0 = mpq_class(big_l) * scale;
    const mpq_class dx = mpq_class(width) * scale;
    auto x_at = [&](const mpz_class& num, int depth) {
        mpq_class y(num);
        mpq_div_2exp(y.get_mpq_t(), y.get_mpq_t(), static_cast<mp_bitcnt_t>(depth));
        return mpq_class(x0 + dx * y);
    };

    std::vector<Node> stack;
    stack.push_back(Node{std::move(q), 0, mpz_class(0)});
    while (!stack.empty()) {
        Node node = std::move(stack.back());
        stack.pop_back();
        trim(node.q);
        if (node.q.size() == 1) continue;
        const int v = descartes_bound_unit(node.q);
        if (v == 0) continue;
        if (v == 1) {
            ++out.count;
            out.isolating.push_back(RootCell{round_down(x_at(node.index, node.depth)),
                                             round_up(x_at(node.index + 1, node.depth)), 1});
            continue;
        }
        if (node.depth >= depth_budget) {
            out.uncertain.push_back(RootCell{round_down(x_at(node.index, node.depth)),
                                             round_up(x_at(node.index + 1, node.depth)), v});
            continue;
        }
        Poly left = halve(node.q);
        mpz_class mid_value = 0;
        for (const auto& c : left) mid_value += c;
        const mpz_class child = node.index * 2;
        if (mid_value == 0) {
            ++out.count;
            const mpq_class xm = x_at(child + 1, node.depth + 1);
            out.isolating.push_back(RootCell{round_down(xm), round_up(xm), 1});
        }
        Poly right = left;
        taylor_shift_one(right);
        if (right[0] == 0) right.erase(right.begin());
        remove_power_of_two(left);
        remove_power_of_two(right);
        stack.push_back(Node{std::move(right), node.depth + 1, child + 1});
        stack.push_back(Node{std::move(left), node.depth + 1, child});
    }
    std::sort(out.isolating.begin(), out.isolating.end(), [](const RootCell& l, const RootCell& r) {
        return l.lo < r.lo || (l.lo == r.lo && l.hi < r.hi);
    });
    return out;
}

}  // namespace

ExactCount exact_count_open(std::span<const double> coeffs, double lo, double hi, int depth_budget,
                            bool square_free) {
    if (!(lo < hi)) throw ParameterError("exact root count needs lo < hi");
    const Poly a = to_integer_poly(coeffs);
    if (is_zero(a)) throw ParameterError("cannot count the roots of the zero polynomial");
    ExactCount out = count_integer_poly(a, lo, hi, depth_budget);
    // Bisection stalls only at repeated or extremely close roots; the gcd is
    // expensive at high degree, so it is computed on demand.
    if (square_free && !out.uncertain.empty()) out = count_integer_poly(square_free_part(a), lo, hi, depth_budget);
    return out;
}

}  // namespace kaclab::detail
