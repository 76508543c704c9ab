#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace cosim {

/// Values of the error indicator below this are raised to it before the
/// step-size controller takes a logarithm.
inline constexpr double epsilon_floor = 1e-12;

/// Per-signal absolute tolerance (signal unit) and relative tolerance.
struct ToleranceSet {
  std::vector<double> absolute;
  std::vector<double> relative;

  [[nodiscard]] std::size_t size() const noexcept { return absolute.size(); }
  /// Throws configuration_error unless both lists have equal length, every
  /// entry is finite and non-negative, and absolute + relative > 0 per signal.
  void validate() const;
};

enum class AggregationKind { rmse, mae, max };

[[nodiscard]] AggregationKind parse_aggregation(std::string_view name);
[[nodiscard]] std::string_view to_string(AggregationKind kind);

/// eps_k = dy_k / (abs_k + rel_k |y_k|), sign preserved.
[[nodiscard]] std::vector<double> normalize(std::span<const double> dy,
                                            std::span<const double> y,
                                            const ToleranceSet& tol);

/// Scalar indicator: root mean square, mean absolute value, or maximum
/// absolute value. Throws argument_error for an empty vector.
[[nodiscard]] double aggregate(std::span<const double> eps, AggregationKind kind);

/// Tolerances from one relative tolerance and per-signal typical magnitudes:
/// abs_k = sigma * typical_k, rel_k = sigma.
[[nodiscard]] ToleranceSet scaled_tolerances(double sigma,
                                             std::span<const double> typical_magnitudes);

}  // namespace cosim
