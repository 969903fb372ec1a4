#pragma once

#include <stdexcept>
#include <string>

namespace kaclab {

/// Invalid parameters or violated preconditions.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input outside the mathematical domain of a function.
class DomainError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// A numerical routine could not reach its target (factorization, convergence).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature did not reach its tolerance; carries the best estimate.
class QuadratureError : public NumericError {
public:
    QuadratureError(const std::string& what, double estimate, double error_estimate)
        : NumericError(what), estimate_(estimate), error_estimate_(error_estimate) {}

    double estimate() const noexcept { return estimate_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double estimate_;
    double error_estimate_;
};

}  // namespace kaclab
