#pragma once

#include <stdexcept>
#include <string>

namespace elliptope {

/// Caller passed something structurally invalid (dimension mismatch, bad
/// partition, zero vector where a direction was required, ...).
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// A mathematical precondition of an operation does not hold for the given
/// input (e.g. a coherence threshold, or one of Walters' inequalities).
/// The message names the failing condition.
class PreconditionError : public std::invalid_argument {
public:
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input is degenerate for the requested computation (singular system,
/// rank-deficient Gram matrix, ...).
class DegenerateInputError : public std::invalid_argument {
public:
    explicit DegenerateInputError(const std::string& what) : std::invalid_argument(what) {}
};

/// An iterative kernel failed to converge within its iteration cap. Carries
/// the residual it got stuck at.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

} // namespace elliptope
