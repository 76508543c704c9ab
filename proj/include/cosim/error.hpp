#pragma once

#include <stdexcept>
#include <string>

namespace cosim {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid scenario, graph, tolerance, or controller configuration.
class configuration_error : public error {
public:
  using error::error;
};

/// A precondition on a function argument was violated.
class argument_error : public error {
public:
  using error::error;
};

/// Raised when a subsystem or monolithic model state becomes non-finite or
/// exceeds the divergence bound.
class divergence_error : public error {
public:
  divergence_error(const std::string& what, double time)
      : error(what), time_(time) {}

  [[nodiscard]] double time() const noexcept { return time_; }

private:
  double time_;
};

class estimator_error : public error {
public:
  using error::error;
};

class controller_error : public error {
public:
  using error::error;
};

}  // namespace cosim
