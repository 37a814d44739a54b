#ifndef CRACKTIP_ERRORS_HPP
#define CRACKTIP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cracktip {

// Bad or inconsistent run configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

// Solver or postprocessing breakdown (CLI exit code 3).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& m) : std::runtime_error(m) {}
};

// Filesystem failure (CLI exit code 4).
struct IoError : std::runtime_error {
  explicit IoError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace cracktip

#endif
