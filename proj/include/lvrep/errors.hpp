#pragma once

#include <stdexcept>
#include <string>

namespace lvrep {

// Invalid configuration or malformed input (bad sizes, non-stochastic rows,
// unparseable files). Maps to CLI exit code 1.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Runtime numerical failure (non-convergence, singular system, undefined
// posterior). Maps to CLI exit code 2.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lvrep
