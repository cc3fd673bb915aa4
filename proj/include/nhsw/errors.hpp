// errors.hpp - exception types shared by every module

#pragma once

#include <stdexcept>
#include <string>

namespace nhsw {

// Invalid parameters or inputs; the CLI maps these to exit code 1.
struct domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Non-finite values, failed eigensolves, norm underflow; exit code 2.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nhsw
