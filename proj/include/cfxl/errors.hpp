#ifndef CFXL_ERRORS_HPP
#define CFXL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cfxl {

// Invalid or inconsistent configuration (bad parameter values, malformed
// config files, unknown scheme names). Maps to CLI exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Failure while producing random scenario data, e.g. the placement
// rejection loop exceeding its attempt cap.
struct GenerationError : std::runtime_error {
  explicit GenerationError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure inside a solver or factorization.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem failure while writing experiment artifacts. Maps to CLI exit code 3.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cfxl

#endif  // CFXL_ERRORS_HPP
