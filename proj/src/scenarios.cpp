#include "cosim/scenarios.hpp"

#include <memory>

#include "cosim/error.hpp"

namespace cosim {

namespace {

// Two subsystems, each with one input and one output: u0 <- y1, u1 <- y0.
ConnectionGraph crossed_graph() {
  ConnectionGraph g;
  g.n_inputs = 2;
  g.n_outputs = 2;
  g.entries = {{1, 0, +1}, {0, 1, +1}};
  return g;
}

// Port 0 is (velocity out, force in), port 1 is (force out, velocity in).
PowerBond force_velocity_bond(std::string label) {
  PowerBond b;
  b.ports = {{0, 0, -1}, {1, 1, +1}};
  b.label = std::move(label);
  return b;
}

}  // namespace

OscillatorParams oscillator_defaults(bool damped) {
  OscillatorParams p;
  p.spring.damping = damped ? 40.0 : 0.0;
  return p;
}

Scenario make_oscillator(const OscillatorParams& params, std::string name) {
  Scenario sc;
  sc.name = std::move(name);
  sc.subsystems = {std::make_shared<MassSubsystem>(params.mass),
                   std::make_shared<SpringDamperSubsystem>(params.spring)};
  sc.graph = crossed_graph();
  sc.bonds = {force_velocity_bond("mass_spring")};
  sc.t_start = 0.0;
  sc.t_stop = 5.0;
  sc.mode = Mode::fixed;
  sc.dt = 0.05;
  sc.controller = ControllerConfig::pi_defaults(1);
  sc.estimator = std::make_shared<NepceEstimator>();
  const double typical[] = {oscillator_typical_force, oscillator_typical_velocity};
  sc.tolerances = scaled_tolerances(oscillator_sigma, typical);
  sc.aggregation = AggregationKind::rmse;
  sc.reference = std::make_shared<MonolithicOscillator>(params.mass, params.spring);
  return sc;
}

Scenario make_quarter_car(const QuarterCarParams& params) {
  auto wheel = params.wheel;
  wheel.chassis_position = params.chassis.position;
  Scenario sc;
  sc.name = "quarter_car";
  sc.subsystems = {std::make_shared<ChassisSubsystem>(params.chassis),
                   std::make_shared<SuspensionWheelSubsystem>(wheel)};
  sc.graph = crossed_graph();
  sc.bonds = {force_velocity_bond("suspension")};
  sc.t_start = 0.0;
  sc.t_stop = 4.0;
  sc.mode = Mode::adaptive;
  sc.dt = 1e-3;
  sc.controller = ControllerConfig::pi_defaults(1);
  sc.estimator = std::make_shared<NepceEstimator>();
  const double typical[] = {quarter_car_typical_force, quarter_car_typical_velocity};
  sc.tolerances = scaled_tolerances(quarter_car_sigma, typical);
  sc.aggregation = AggregationKind::rmse;
  sc.reference = std::make_shared<MonolithicQuarterCar>(params.chassis, wheel);
  return sc;
}

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"mass_spring", "mass_spring_damped",
                                                 "quarter_car"};
  return names;
}

Scenario builtin_scenario(std::string_view name) {
  if (name == "mass_spring") return make_oscillator(oscillator_defaults(false), "mass_spring");
  if (name == "mass_spring_damped") {
    return make_oscillator(oscillator_defaults(true), "mass_spring_damped");
  }
  if (name == "quarter_car") return make_quarter_car(QuarterCarParams{});
  throw configuration_error("unknown scenario '" + std::string(name) + "'");
}

}  // namespace cosim
