#pragma once

#include <stdexcept>
#include <string>

namespace gtdet {

// Bad input (precondition violated).
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical failure: ill-conditioning, non-convergence, spurious imaginary part.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input accepted in principle but refused by a size guard.
struct RefusalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Broken internal invariant. Never expected to fire.
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace gtdet
