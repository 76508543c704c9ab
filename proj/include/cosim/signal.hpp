#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace cosim {

/// Name and unit of one coupling variable. Units are labels only.
struct SignalInfo {
  std::string label;
  std::string unit;
};

/// Shared metadata for a family of signal vectors (all inputs or all outputs
/// of a coupled system).
struct SignalLayout {
  std::vector<SignalInfo> slots;

  [[nodiscard]] std::size_t size() const noexcept { return slots.size(); }
};

/// Ordered real-valued coupling variables with per-slot labels and units.
///
/// The layout is shared between all vectors of the same family, so copying a
/// SignalVector only copies the values. The length is fixed by the layout.
class SignalVector {
public:
  SignalVector() = default;
  explicit SignalVector(std::shared_ptr<const SignalLayout> layout);
  SignalVector(std::shared_ptr<const SignalLayout> layout, std::vector<double> values);

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
  [[nodiscard]] double& operator[](std::size_t i) { return values_[i]; }

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<double> values() noexcept { return values_; }

  [[nodiscard]] const std::string& label(std::size_t i) const;
  [[nodiscard]] const std::string& unit(std::size_t i) const;
  [[nodiscard]] const std::shared_ptr<const SignalLayout>& layout() const noexcept {
    return layout_;
  }

  /// True when every value is finite.
  [[nodiscard]] bool all_finite() const noexcept;

private:
  std::shared_ptr<const SignalLayout> layout_;
  std::vector<double> values_;
};

[[nodiscard]] bool all_finite(std::span<const double> values) noexcept;

/// Throws argument_error naming `what` unless both spans have equal length.
void require_same_length(std::span<const double> a, std::span<const double> b,
                         const char* what);

}  // namespace cosim
