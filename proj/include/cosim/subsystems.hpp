#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cosim/subsystem.hpp"

namespace cosim {

// Built-in benchmark subsystems. All integrate with forward Euler on a fixed
// micro step; derivatives are evaluated at the state at the start of each
// micro step. Displacements are measured from equilibrium (no gravity).

/// Point mass driven by a force. Input F [N], output v [m/s].
class MassSubsystem final : public MicroSteppedSubsystem {
public:
  struct Params {
    double mass = 100.0;
    double velocity = 0.0;
    double position = 0.0;
    double micro_dt = 1e-4;
  };

  explicit MassSubsystem(const Params& p);

  [[nodiscard]] std::string name() const override { return "mass"; }
  [[nodiscard]] const std::vector<SignalInfo>& inputs() const override;
  [[nodiscard]] const std::vector<SignalInfo>& outputs() const override;
  void get_outputs(std::span<double> y) const override;
  [[nodiscard]] std::optional<double> stored_energy() const override;
  [[nodiscard]] std::unique_ptr<Subsystem> clone() const override;

  [[nodiscard]] double velocity() const noexcept { return v_; }
  [[nodiscard]] double position() const noexcept { return x_; }

protected:
  void advance(double dt) override;
  [[nodiscard]] bool state_finite() const override;

private:
  double m_;
  double v_;
  double x_;
};

/// Linear spring with optional parallel damper, driven by the velocity of
/// the attached mass. Input v [m/s], output F = -k x - d v [N], the force
/// exerted on the mass. Has direct feed-through dF/dv = -d when d > 0.
class SpringDamperSubsystem final : public MicroSteppedSubsystem {
public:
  struct Params {
    double stiffness = 1e3;
    double damping = 0.0;
    double extension = 1.0;
    double micro_dt = 1e-4;
  };

  explicit SpringDamperSubsystem(const Params& p);

  [[nodiscard]] std::string name() const override { return "spring_damper"; }
  [[nodiscard]] const std::vector<SignalInfo>& inputs() const override;
  [[nodiscard]] const std::vector<SignalInfo>& outputs() const override;
  void get_outputs(std::span<double> y) const override;
  [[nodiscard]] std::vector<FeedthroughEntry> feedthrough() const override;
  [[nodiscard]] std::optional<double> stored_energy() const override;
  [[nodiscard]] double dissipated_energy() const override { return dissipated_; }
  [[nodiscard]] std::unique_ptr<Subsystem> clone() const override;

  [[nodiscard]] double extension() const noexcept { return x_; }

protected:
  void advance(double dt) override;
  [[nodiscard]] bool state_finite() const override;

private:
  double k_;
  double d_;
  double x_;
  double dissipated_ = 0.0;
};

/// Quarter-car chassis (sprung mass). Input F [N] from the suspension,
/// output chassis velocity v_c [m/s].
class ChassisSubsystem final : public MicroSteppedSubsystem {
public:
  struct Params {
    double mass = 400.0;
    double velocity = 0.0;
    double position = 0.1;
    double micro_dt = 1e-4;
  };

  explicit ChassisSubsystem(const Params& p);

  [[nodiscard]] std::string name() const override { return "chassis"; }
  [[nodiscard]] const std::vector<SignalInfo>& inputs() const override;
  [[nodiscard]] const std::vector<SignalInfo>& outputs() const override;
  void get_outputs(std::span<double> y) const override;
  [[nodiscard]] std::optional<double> stored_energy() const override;
  [[nodiscard]] std::unique_ptr<Subsystem> clone() const override;

  [[nodiscard]] double velocity() const noexcept { return v_; }
  [[nodiscard]] double position() const noexcept { return z_; }

protected:
  void advance(double dt) override;
  [[nodiscard]] bool state_finite() const override;

private:
  double m_;
  double v_;
  double z_;
};

/// Quarter-car suspension and wheel (unsprung mass on a tyre spring).
///
/// Only the chassis velocity crosses the interface, so the chassis position
/// seen by the suspension spring is integrated internally from it. Input
/// v_c [m/s], output suspension force on the chassis
/// F = k_c (z_w - z_c) + d_c (v_w - v_c) [N].
class SuspensionWheelSubsystem final : public MicroSteppedSubsystem {
public:
  struct Params {
    double suspension_stiffness = 1.5e4;
    double suspension_damping = 1e3;
    double wheel_mass = 40.0;
    double tyre_stiffness = 1.5e5;
    double chassis_position = 0.1;
    double wheel_position = 0.0;
    double wheel_velocity = 0.0;
    double micro_dt = 1e-4;
  };

  explicit SuspensionWheelSubsystem(const Params& p);

  [[nodiscard]] std::string name() const override { return "suspension_wheel"; }
  [[nodiscard]] const std::vector<SignalInfo>& inputs() const override;
  [[nodiscard]] const std::vector<SignalInfo>& outputs() const override;
  void get_outputs(std::span<double> y) const override;
  [[nodiscard]] std::vector<FeedthroughEntry> feedthrough() const override;
  [[nodiscard]] std::optional<double> stored_energy() const override;
  [[nodiscard]] double dissipated_energy() const override { return dissipated_; }
  [[nodiscard]] std::unique_ptr<Subsystem> clone() const override;

  [[nodiscard]] double chassis_position() const noexcept { return zc_; }
  [[nodiscard]] double wheel_position() const noexcept { return zw_; }
  [[nodiscard]] double wheel_velocity() const noexcept { return vw_; }

protected:
  void advance(double dt) override;
  [[nodiscard]] bool state_finite() const override;

private:
  [[nodiscard]] double force(double chassis_velocity) const;

  Params p_;
  double zc_;
  double zw_;
  double vw_;
  double dissipated_ = 0.0;
};

}  // namespace cosim
