#pragma once

#include <stdexcept>
#include <string>

namespace nkgroup {

// Invalid argument or configuration value.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure did not reach its accuracy target.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ParameterError(message);
}

}  // namespace nkgroup
