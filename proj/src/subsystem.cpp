#include "cosim/subsystem.hpp"

#include <cmath>

#include "cosim/error.hpp"

namespace cosim {

std::vector<double> Subsystem::outputs_vector() const {
  std::vector<double> y(outputs().size());
  get_outputs(y);
  return y;
}

std::size_t micro_step_count(double h, double micro_dt) {
  if (!(h > 0.0) || !(micro_dt > 0.0)) {
    throw argument_error("micro stepping requires positive durations");
  }
  const double ratio = h / micro_dt;
  auto n = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
  return n == 0 ? 1 : n;
}

MicroSteppedSubsystem::MicroSteppedSubsystem(double micro_dt) : micro_dt_(micro_dt) {
  if (!(micro_dt > 0.0) || !std::isfinite(micro_dt)) {
    throw configuration_error("micro step must be positive and finite");
  }
}

void MicroSteppedSubsystem::set_inputs(std::span<const double> u) {
  if (u.size() != inputs().size()) {
    throw argument_error(name() + ": expected " + std::to_string(inputs().size()) +
                         " inputs, got " + std::to_string(u.size()));
  }
  if (!all_finite(u)) throw argument_error(name() + ": non-finite input");
  u_.assign(u.begin(), u.end());
}

void MicroSteppedSubsystem::do_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw argument_error(name() + ": step size must be positive, got " + std::to_string(h));
  }
  if (u_.size() != inputs().size()) u_.assign(inputs().size(), 0.0);
  const double t0 = time_;
  double elapsed = 0.0;
  for_each_micro_step(h, micro_dt_, [&](double dt) {
    advance(dt);
    elapsed += dt;
    if (!state_finite()) {
      time_ = t0 + elapsed;
      throw divergence_error(name() + ": non-finite state", time_);
    }
  });
  time_ = t0 + h;
}

}  // namespace cosim
