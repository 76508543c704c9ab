#include "cosim/controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cosim/error.hpp"
#include "cosim/indicator.hpp"

namespace cosim {

ControllerConfig ControllerConfig::pi_defaults(int order) {
  if (order < 1) throw configuration_error("controller order p must be >= 1");
  ControllerConfig c;
  c.order = order;
  c.k_p = 0.4 / order;
  c.k_i = 0.3 / order;
  return c;
}

ControllerConfig ControllerConfig::integrating(int order) {
  if (order < 1) throw configuration_error("controller order p must be >= 1");
  ControllerConfig c;
  c.order = order;
  c.k_p = 0.0;
  c.k_i = 1.0 / order;
  return c;
}

void ControllerConfig::validate() const {
  auto fail = [](const std::string& msg) { throw configuration_error("controller: " + msg); };
  if (!(dt_min > 0.0)) fail("dt_min must be positive");
  if (!(dt_min <= dt_start)) fail("dt_start must be >= dt_min");
  if (!(dt_start <= dt_max)) fail("dt_start must be <= dt_max");
  if (!std::isfinite(dt_start)) fail("dt_start must be finite");
  if (!(theta_min > 0.0 && theta_min < 1.0)) fail("theta_min must lie in (0, 1)");
  if (!(theta_max > 1.0)) fail("theta_max must be > 1");
  if (!(k_p >= 0.0) || !std::isfinite(k_p)) fail("k_p must be non-negative");
  if (!(k_i > 0.0) || !std::isfinite(k_i)) fail("k_i must be positive");
  if (!(safety > 0.0 && safety <= 1.0)) fail("safety factor must lie in (0, 1]");
  if (order < 1) fail("order p must be >= 1");
}

ControllerState reset(const ControllerConfig& config) {
  config.validate();
  ControllerState s;
  s.integral = std::log(config.dt_start);
  s.last_dt = config.dt_start;
  s.anchor_log = s.integral;
  s.anchor_dt = config.dt_start;
  return s;
}

double compute_next_step_size(const ControllerConfig& c, ControllerState& s, double dt_old,
                              double eps) {
  if (!std::isfinite(eps) || eps < 0.0) {
    throw controller_error("error indicator must be finite and non-negative, got " +
                           std::to_string(eps));
  }
  if (!(dt_old > 0.0) || !std::isfinite(dt_old)) {
    throw controller_error("previous step size must be positive");
  }
  const double e = -std::log(std::max(eps, epsilon_floor));
  const double integral = s.integral + c.k_i * e;
  const double ell = c.k_p * e + integral;
  const double unscaled = s.anchor_dt * std::exp(ell - s.anchor_log);
  const double candidate = c.safety * unscaled;

  double dt = std::min({std::max({candidate, c.dt_min, c.theta_min * dt_old}), c.dt_max,
                        c.theta_max * dt_old});
  if (dt < c.dt_min) {
    dt = c.dt_min;
    ++s.clamp_conflicts;
  }

  // Anti-windup. The bracket vanishes when the candidate was not limited; it
  // is skipped in that case so repeated eps = 1 calls reproduce dt exactly.
  // The safety factor is divided out so its bias does not accumulate.
  if (dt == candidate) {
    s.integral = integral;
    s.anchor_log = ell;
    s.anchor_dt = unscaled;
  } else {
    s.integral = integral + std::log(dt / c.safety) - ell;
    s.anchor_log = std::log(dt / c.safety);
    s.anchor_dt = dt / c.safety;
  }
  s.last_dt = dt;
  s.last_error = e;
  return dt;
}

double compact_reference(double dt_prev, double eps_now, double eps_prev,
                         const ControllerConfig& c) {
  if (!(eps_now > 0.0) || !(eps_prev > 0.0)) {
    throw argument_error("compact_reference: error indicators must be positive");
  }
  return std::pow(eps_now, -c.k_p - c.k_i) * std::pow(eps_prev, c.k_p) * dt_prev;
}

PiController::PiController(const ControllerConfig& config)
    : config_(config), state_(cosim::reset(config)) {}

}  // namespace cosim
