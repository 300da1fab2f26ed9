#pragma once

#include <stdexcept>
#include <string>

namespace waveshape {

/// Operands disagree on volume or mask dimensions.
class ShapeMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A query fell outside the domain an operation is defined on.
class DomainError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Malformed input: bad file magic, inconsistent manifest, invalid parameters.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation produced a non-finite value or failed to converge.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace waveshape
