#pragma once

#include <memory>
#include <span>
#include <vector>

#include "cosim/subsystems.hpp"

namespace cosim {

/// Single-solver forward-Euler model of a fully coupled benchmark system.
/// Outputs are ordered like the outputs of the matching co-simulation.
class MonolithicModel {
public:
  virtual ~MonolithicModel() = default;

  /// One forward-Euler update of size `dt` with all derivatives taken at the
  /// current state.
  virtual void step(double dt) = 0;
  [[nodiscard]] virtual std::vector<double> outputs() const = 0;
  [[nodiscard]] virtual double total_energy() const = 0;
  [[nodiscard]] virtual double dissipated_energy() const = 0;
  [[nodiscard]] virtual bool state_finite() const = 0;
  [[nodiscard]] virtual std::unique_ptr<MonolithicModel> clone() const = 0;
};

/// Mass-spring(-damper) oscillator: outputs (v, F) with F = -k x - d v.
class MonolithicOscillator final : public MonolithicModel {
public:
  MonolithicOscillator(const MassSubsystem::Params& mass,
                       const SpringDamperSubsystem::Params& spring);

  void step(double dt) override;
  [[nodiscard]] std::vector<double> outputs() const override;
  [[nodiscard]] double total_energy() const override;
  [[nodiscard]] double dissipated_energy() const override { return dissipated_; }
  [[nodiscard]] bool state_finite() const override;
  [[nodiscard]] std::unique_ptr<MonolithicModel> clone() const override;

  [[nodiscard]] double position() const noexcept { return x_; }
  [[nodiscard]] double velocity() const noexcept { return v_; }

private:
  double m_, k_, d_;
  double x_, v_;
  double dissipated_ = 0.0;
};

/// Two-mass quarter car: outputs (v_c, F_susp).
class MonolithicQuarterCar final : public MonolithicModel {
public:
  MonolithicQuarterCar(const ChassisSubsystem::Params& chassis,
                       const SuspensionWheelSubsystem::Params& wheel);

  void step(double dt) override;
  [[nodiscard]] std::vector<double> outputs() const override;
  [[nodiscard]] double total_energy() const override;
  [[nodiscard]] double dissipated_energy() const override { return dissipated_; }
  [[nodiscard]] bool state_finite() const override;
  [[nodiscard]] std::unique_ptr<MonolithicModel> clone() const override;

private:
  [[nodiscard]] double suspension_force() const;

  double mc_, mw_, kc_, kw_, dc_;
  double zc_, vc_, zw_, vw_;
  double dissipated_ = 0.0;
};

/// Closed-form energy of the oscillator state: m v^2 / 2 + k x^2 / 2.
[[nodiscard]] double oscillator_energy(double mass, double stiffness, double velocity,
                                       double position);

struct MonolithicSample {
  double t = 0.0;
  std::vector<double> outputs;
  double energy = 0.0;
  double dissipated = 0.0;
  /// True for requested sample times and the final time.
  bool sync = false;
};

struct MonolithicSeries {
  double solver_dt = 0.0;
  std::vector<MonolithicSample> samples;

  /// Sample closest to `t`, or nullptr when none lies within `tolerance`.
  [[nodiscard]] const MonolithicSample* nearest(double t, double tolerance) const;
};

/// Integrates `model` from `t_start` to `t_stop` with solver step `dt`,
/// recording every solver step. Each requested sample time in
/// (t_start, t_stop] is hit exactly: the solver step before it is shortened
/// and the step grid restarts there, just as a micro-stepped subsystem
/// restarts at each synchronization point.
///
/// Throws argument_error for dt <= 0 or t_stop < t_start, and
/// divergence_error when the state stops being finite or an output exceeds
/// the divergence bound.
[[nodiscard]] MonolithicSeries run_monolithic(const MonolithicModel& model, double t_stop,
                                              double dt,
                                              std::span<const double> sample_times = {},
                                              double t_start = 0.0);

}  // namespace cosim
