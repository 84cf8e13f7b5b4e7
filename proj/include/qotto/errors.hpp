// errors.hpp — error types shared across the library.

#pragma once

#include <stdexcept>

namespace qotto {

// Malformed or out-of-contract inputs.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A requested quantity has no defined value at this parameter point
// (vanishing mean heat, moments of a distribution with mass at infinity, ...).
class UndefinedResult : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Sampled outcomes landed outside the exact support of the reference
// distribution. Raised by goodness-of-fit checks; always a correctness signal.
class SupportViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qotto
