#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cosim/signal.hpp"

namespace cosim {

/// Magnitude beyond which an output or state is treated as diverged.
inline constexpr double divergence_bound = 1e12;

/// Direct feed-through from a local input to a local output, optionally with
/// the interface Jacobian entry d y_output / d u_input.
struct FeedthroughEntry {
  std::size_t output = 0;
  std::size_t input = 0;
  std::optional<double> derivative;
};

/// Black-box subsystem behind the minimal co-simulation interface: accept
/// inputs, advance by a positive duration, report outputs.
///
/// Inputs set before a step are held constant (zero-order hold) for the whole
/// step unless the subsystem declares a higher extrapolation order. Outputs
/// reported after a step belong to the end time of that step.
class Subsystem {
public:
  virtual ~Subsystem() = default;

  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual const std::vector<SignalInfo>& inputs() const = 0;
  [[nodiscard]] virtual const std::vector<SignalInfo>& outputs() const = 0;

  virtual void set_inputs(std::span<const double> u) = 0;
  /// Advances internal time by `h` > 0. Throws argument_error for h <= 0 and
  /// divergence_error if the state stops being finite.
  virtual void do_step(double h) = 0;
  virtual void get_outputs(std::span<double> y) const = 0;

  [[nodiscard]] virtual double time() const = 0;

  /// Input extrapolation order m (0 for zero-order hold).
  [[nodiscard]] virtual int extrapolation_order() const { return 0; }
  [[nodiscard]] virtual std::vector<FeedthroughEntry> feedthrough() const { return {}; }

  /// Energy stored in the subsystem, when it can account for it.
  [[nodiscard]] virtual std::optional<double> stored_energy() const { return std::nullopt; }
  /// Energy dissipated internally since construction.
  [[nodiscard]] virtual double dissipated_energy() const { return 0.0; }

  [[nodiscard]] virtual std::unique_ptr<Subsystem> clone() const = 0;

  [[nodiscard]] std::vector<double> outputs_vector() const;
};

/// Sizes of the micro steps covering `h`: full steps of `micro_dt` with the
/// last one shortened so the sizes sum exactly to `h`. A remainder below
/// 1e-9 micro steps is merged into the preceding step rather than taken as a
/// sliver.
[[nodiscard]] std::size_t micro_step_count(double h, double micro_dt);

/// Calls `fn(dt)` for each micro step covering `h`.
template <class Fn>
void for_each_micro_step(double h, double micro_dt, Fn&& fn) {
  const std::size_t n = micro_step_count(h, micro_dt);
  for (std::size_t k = 0; k + 1 < n; ++k) fn(micro_dt);
  fn(h - static_cast<double>(n - 1) * micro_dt);
}

/// Subsystem integrated with a fixed-size internal solver step. Derived
/// classes implement one forward-Euler update in `advance`.
class MicroSteppedSubsystem : public Subsystem {
public:
  explicit MicroSteppedSubsystem(double micro_dt);

  void set_inputs(std::span<const double> u) override;
  void do_step(double h) override;
  [[nodiscard]] double time() const override { return time_; }
  [[nodiscard]] double micro_dt() const noexcept { return micro_dt_; }

protected:
  virtual void advance(double dt) = 0;
  [[nodiscard]] virtual bool state_finite() const = 0;
  // Held input value; 0 before the first set_inputs call.
  [[nodiscard]] double input(std::size_t i) const { return i < u_.size() ? u_[i] : 0.0; }

private:
  double micro_dt_;
  double time_ = 0.0;
  std::vector<double> u_;
};

}  // namespace cosim
