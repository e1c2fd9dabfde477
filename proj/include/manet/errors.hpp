#pragma once

#include <stdexcept>
#include <string>

namespace manet {

/// Bad scenario or parameter. The CLI maps it to exit status 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A simulator invariant was broken during a run. The CLI maps it to exit status 2.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace manet
