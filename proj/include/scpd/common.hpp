#pragma once

#include <stdexcept>
#include <string>

namespace scpd {

/// Invalid or malformed input: bad files, bad edges, bad arguments.
/// The CLI maps this to exit code 2.
class data_error : public std::runtime_error {
 public:
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Failure inside a numerical routine (size caps, non-convergence).
/// The CLI maps this to exit code 3.
class compute_error : public std::runtime_error {
 public:
  explicit compute_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace scpd
