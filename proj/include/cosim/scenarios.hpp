#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cosim/master.hpp"
#include "cosim/subsystems.hpp"

namespace cosim {

struct OscillatorParams {
  MassSubsystem::Params mass;
  SpringDamperSubsystem::Params spring;
};

struct QuarterCarParams {
  ChassisSubsystem::Params chassis;
  /// wheel.chassis_position is overwritten with chassis.position.
  SuspensionWheelSubsystem::Params wheel;
};

/// Mass and spring(-damper) coupled through the crossed graph
/// u = (F, v) = (y_1, y_0) with one force-velocity power bond. Defaults: fixed
/// mode, dt = 0.05 s, t_stop = 5 s, NEPCE on both inputs with RMSE.
[[nodiscard]] Scenario make_oscillator(const OscillatorParams& params, std::string name);

/// Chassis and suspension-wheel subsystems with the same wiring. Defaults:
/// adaptive mode, t_stop = 4 s, NEPCE on both inputs with RMSE,
/// sigma = 2e-3 and typical magnitudes (1e3 N, 0.3 m/s).
[[nodiscard]] Scenario make_quarter_car(const QuarterCarParams& params);

/// Undamped oscillator parameters (d = 0) and the damped variant (d = 40).
[[nodiscard]] OscillatorParams oscillator_defaults(bool damped);

/// "mass_spring", "mass_spring_damped" or "quarter_car" with default
/// parameters. Throws configuration_error for any other name.
[[nodiscard]] Scenario builtin_scenario(std::string_view name);
[[nodiscard]] const std::vector<std::string>& builtin_names();

/// Typical magnitudes used to scale the default oscillator tolerances.
inline constexpr double oscillator_typical_force = 1e3;
inline constexpr double oscillator_typical_velocity = 3.0;
inline constexpr double oscillator_sigma = 1e-2;

inline constexpr double quarter_car_typical_force = 1e3;
inline constexpr double quarter_car_typical_velocity = 0.3;
inline constexpr double quarter_car_sigma = 2e-3;

}  // namespace cosim
