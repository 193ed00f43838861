#pragma once

#include <stdexcept>
#include <string>

namespace cwot {

// invalid arguments, malformed files, unsupported requests; CLI exit code 1
struct input_error : std::invalid_argument {
    explicit input_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// exceeded iteration caps or failed internal certification; CLI exit code 2
struct solver_error : std::runtime_error {
    explicit solver_error(const std::string& msg) : std::runtime_error(msg) {}
};

// the distribution family has no closed-form projected law; callers may fall
// back to a large reference sample
struct unsupported_family_error : input_error {
    explicit unsupported_family_error(const std::string& msg) : input_error(msg) {}
};

} // namespace cwot
