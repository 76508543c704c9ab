#pragma once

#include <cstddef>

namespace cosim {

/// Configuration of the PI macro-step controller.
///
/// The controller works on log(dt): the control error is e = -log(eps), the
/// integral state accumulates k_i * e, and the candidate step is
/// alpha * exp(k_p * e + integral). The candidate is then limited to
/// [dt_min, dt_max] and to [theta_min, theta_max] times the previous step.
struct ControllerConfig {
  double k_p = 0.4;
  double k_i = 0.3;
  double dt_min = 1e-4;
  double dt_max = 1e-2;
  double theta_min = 0.2;
  double theta_max = 1.5;
  /// Order p of the error indicator in the step size, eps = O(dt^p).
  int order = 1;
  /// Safety factor alpha in (0, 1].
  double safety = 1.0;
  double dt_start = 1e-4;

  /// Gains k_p = 0.4 / p, k_i = 0.3 / p with the remaining fields at their
  /// defaults.
  [[nodiscard]] static ControllerConfig pi_defaults(int order);
  /// Pure integrating controller: k_p = 0, k_i = 1 / p.
  [[nodiscard]] static ControllerConfig integrating(int order);

  /// Throws configuration_error when an invariant does not hold.
  void validate() const;
};

struct ControllerState {
  /// Integral state in log-seconds.
  double integral = 0.0;
  double last_dt = 0.0;
  double last_error = 0.0;
  /// Number of calls where the rate limit conflicted with dt_min.
  std::size_t clamp_conflicts = 0;
  /// A point (log_dt, dt) on the exponential. Candidates are evaluated as
  /// anchor_dt * exp(l - anchor_log) so that l == anchor_log reproduces
  /// anchor_dt bit-exactly.
  double anchor_log = 0.0;
  double anchor_dt = 1.0;
};

/// Fresh controller state. The integral starts at log(dt_start) so the first
/// call with eps = 1 returns dt_start.
[[nodiscard]] ControllerState reset(const ControllerConfig& config);

/// One controller update; returns the next macro step size and updates
/// `state`. `dt_old` is the previously applied step. `eps` below
/// epsilon_floor is raised to it; a negative or non-finite `eps` throws
/// controller_error.
///
/// When theta_max * dt_old < dt_min the hard bound wins: the result is
/// dt_min and state.clamp_conflicts is incremented.
double compute_next_step_size(const ControllerConfig& config, ControllerState& state,
                              double dt_old, double eps);

/// Unlimited candidate of the compact PI law,
/// eps_now^(-k_p - k_i) * eps_prev^(k_p) * dt_prev.
[[nodiscard]] double compact_reference(double dt_prev, double eps_now, double eps_prev,
                                       const ControllerConfig& config);

/// Owns a configuration and its state.
class PiController {
public:
  explicit PiController(const ControllerConfig& config);

  double next(double dt_old, double eps) {
    return compute_next_step_size(config_, state_, dt_old, eps);
  }
  void reset() { state_ = cosim::reset(config_); }

  [[nodiscard]] const ControllerConfig& config() const noexcept { return config_; }
  [[nodiscard]] const ControllerState& state() const noexcept { return state_; }

private:
  ControllerConfig config_;
  ControllerState state_;
};

}  // namespace cosim
