#pragma once

#include <stdexcept>
#include <string>

namespace chiral {

// Bad input: malformed files, violated preconditions, inconsistent sizes.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation ran but its result is unusable (closure failure, overflow, stall).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace chiral
