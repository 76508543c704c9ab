#include "cosim/subsystems.hpp"

#include <cmath>

#include "cosim/error.hpp"

namespace cosim {

namespace {

const std::vector<SignalInfo>& force_signal() {
  static const std::vector<SignalInfo> s{{"F", "N"}};
  return s;
}

const std::vector<SignalInfo>& velocity_signal() {
  static const std::vector<SignalInfo> s{{"v", "m/s"}};
  return s;
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw configuration_error(std::string(what) + " must be positive and finite");
  }
}

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) throw configuration_error(std::string(what) + " must be finite");
}

bool finite(std::initializer_list<double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------

MassSubsystem::MassSubsystem(const Params& p)
    : MicroSteppedSubsystem(p.micro_dt), m_(p.mass), v_(p.velocity), x_(p.position) {
  require_positive(p.mass, "mass");
  require_finite(p.velocity, "mass velocity");
  require_finite(p.position, "mass position");
}

const std::vector<SignalInfo>& MassSubsystem::inputs() const { return force_signal(); }
const std::vector<SignalInfo>& MassSubsystem::outputs() const { return velocity_signal(); }

void MassSubsystem::get_outputs(std::span<double> y) const { y[0] = v_; }

std::optional<double> MassSubsystem::stored_energy() const { return 0.5 * m_ * v_ * v_; }

std::unique_ptr<Subsystem> MassSubsystem::clone() const {
  return std::make_unique<MassSubsystem>(*this);
}

void MassSubsystem::advance(double dt) {
  const double a = input(0) / m_;
  x_ += v_ * dt;
  v_ += a * dt;
}

bool MassSubsystem::state_finite() const { return finite({v_, x_}); }

// ---------------------------------------------------------------------------

SpringDamperSubsystem::SpringDamperSubsystem(const Params& p)
    : MicroSteppedSubsystem(p.micro_dt), k_(p.stiffness), d_(p.damping), x_(p.extension) {
  require_positive(p.stiffness, "spring stiffness");
  if (!(p.damping >= 0.0) || !std::isfinite(p.damping)) {
    throw configuration_error("damping must be non-negative and finite");
  }
  require_finite(p.extension, "spring extension");
}

const std::vector<SignalInfo>& SpringDamperSubsystem::inputs() const {
  return velocity_signal();
}
const std::vector<SignalInfo>& SpringDamperSubsystem::outputs() const {
  return force_signal();
}

void SpringDamperSubsystem::get_outputs(std::span<double> y) const {
  y[0] = -k_ * x_ - d_ * input(0);
}

std::vector<FeedthroughEntry> SpringDamperSubsystem::feedthrough() const {
  if (d_ == 0.0) return {};
  return {{0, 0, -d_}};
}

std::optional<double> SpringDamperSubsystem::stored_energy() const {
  return 0.5 * k_ * x_ * x_;
}

std::unique_ptr<Subsystem> SpringDamperSubsystem::clone() const {
  return std::make_unique<SpringDamperSubsystem>(*this);
}

void SpringDamperSubsystem::advance(double dt) {
  const double v = input(0);
  dissipated_ += d_ * v * v * dt;
  x_ += v * dt;
}

bool SpringDamperSubsystem::state_finite() const { return finite({x_, dissipated_}); }

// ---------------------------------------------------------------------------

ChassisSubsystem::ChassisSubsystem(const Params& p)
    : MicroSteppedSubsystem(p.micro_dt), m_(p.mass), v_(p.velocity), z_(p.position) {
  require_positive(p.mass, "chassis mass");
  require_finite(p.velocity, "chassis velocity");
  require_finite(p.position, "chassis position");
}

const std::vector<SignalInfo>& ChassisSubsystem::inputs() const { return force_signal(); }
const std::vector<SignalInfo>& ChassisSubsystem::outputs() const {
  static const std::vector<SignalInfo> s{{"v_c", "m/s"}};
  return s;
}

void ChassisSubsystem::get_outputs(std::span<double> y) const { y[0] = v_; }

std::optional<double> ChassisSubsystem::stored_energy() const { return 0.5 * m_ * v_ * v_; }

std::unique_ptr<Subsystem> ChassisSubsystem::clone() const {
  return std::make_unique<ChassisSubsystem>(*this);
}

void ChassisSubsystem::advance(double dt) {
  const double a = input(0) / m_;
  z_ += v_ * dt;
  v_ += a * dt;
}

bool ChassisSubsystem::state_finite() const { return finite({v_, z_}); }

// ---------------------------------------------------------------------------

SuspensionWheelSubsystem::SuspensionWheelSubsystem(const Params& p)
    : MicroSteppedSubsystem(p.micro_dt),
      p_(p),
      zc_(p.chassis_position),
      zw_(p.wheel_position),
      vw_(p.wheel_velocity) {
  require_positive(p.suspension_stiffness, "suspension stiffness");
  require_positive(p.suspension_damping, "suspension damping");
  require_positive(p.wheel_mass, "wheel mass");
  require_positive(p.tyre_stiffness, "tyre stiffness");
  require_finite(p.chassis_position, "chassis position");
  require_finite(p.wheel_position, "wheel position");
  require_finite(p.wheel_velocity, "wheel velocity");
}

const std::vector<SignalInfo>& SuspensionWheelSubsystem::inputs() const {
  static const std::vector<SignalInfo> s{{"v_c", "m/s"}};
  return s;
}
const std::vector<SignalInfo>& SuspensionWheelSubsystem::outputs() const {
  static const std::vector<SignalInfo> s{{"F_susp", "N"}};
  return s;
}

double SuspensionWheelSubsystem::force(double chassis_velocity) const {
  return p_.suspension_stiffness * (zw_ - zc_) +
         p_.suspension_damping * (vw_ - chassis_velocity);
}

void SuspensionWheelSubsystem::get_outputs(std::span<double> y) const {
  y[0] = force(input(0));
}

std::vector<FeedthroughEntry> SuspensionWheelSubsystem::feedthrough() const {
  return {{0, 0, -p_.suspension_damping}};
}

std::optional<double> SuspensionWheelSubsystem::stored_energy() const {
  const double stretch = zw_ - zc_;
  return 0.5 * p_.suspension_stiffness * stretch * stretch +
         0.5 * p_.wheel_mass * vw_ * vw_ + 0.5 * p_.tyre_stiffness * zw_ * zw_;
}

std::unique_ptr<Subsystem> SuspensionWheelSubsystem::clone() const {
  return std::make_unique<SuspensionWheelSubsystem>(*this);
}

void SuspensionWheelSubsystem::advance(double dt) {
  const double vc = input(0);
  const double f = force(vc);
  const double aw = (-f - p_.tyre_stiffness * zw_) / p_.wheel_mass;
  const double rel = vw_ - vc;
  dissipated_ += p_.suspension_damping * rel * rel * dt;
  zc_ += vc * dt;
  zw_ += vw_ * dt;
  vw_ += aw * dt;
}

bool SuspensionWheelSubsystem::state_finite() const {
  return finite({zc_, zw_, vw_, dissipated_});
}

}  // namespace cosim
