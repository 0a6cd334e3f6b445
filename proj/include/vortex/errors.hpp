#pragma once

#include <stdexcept>
#include <string>

namespace vortex {

// Bad input: the caller asked for something the model does not define.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// The numerics broke down (singular system, NaN, failed factorization).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct SlopeUndefinedError : ValidationError {
    using ValidationError::ValidationError;
};
struct NoSectionsError : ValidationError {
    using ValidationError::ValidationError;
};
struct InfeasibleParameterError : ValidationError {
    using ValidationError::ValidationError;
};
struct NotSemistableError : ValidationError {
    using ValidationError::ValidationError;
};
struct PreconditionError : ValidationError {
    using ValidationError::ValidationError;
};
struct DependentSectionsError : NumericalError {
    using NumericalError::NumericalError;
};

class SingularOperatorError : public NumericalError {
public:
    SingularOperatorError(const std::string& what, double smallest)
        : NumericalError(what), smallest_eigenvalue(smallest) {}
    double smallest_eigenvalue;
};

} // namespace vortex
