#pragma once

#include <span>
#include <vector>

#include "kaclab/root_count.hpp"

namespace kaclab::detail {

/// Exact sign of sum c_i x^i for double coefficients and a double argument.
int exact_sign(std::span<const double> coeffs, double x);

struct ExactCount {
    int count = 0;
    std::vector<RootCell> isolating;
    std::vector<RootCell> uncertain;
};

/// Distinct roots in the open interval (lo, hi) by Descartes-bound bisection
/// over exact integers. With square_free set, a run that leaves uncertain
/// cells is repeated on p / gcd(p, p').
ExactCount exact_count_open(std::span<const double> coeffs, double lo, double hi, int depth_budget,
                            bool square_free);

}  // namespace kaclab::detail
