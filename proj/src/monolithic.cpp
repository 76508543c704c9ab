#include "cosim/monolithic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cosim/error.hpp"

namespace cosim {

double oscillator_energy(double mass, double stiffness, double velocity, double position) {
  return 0.5 * mass * velocity * velocity + 0.5 * stiffness * position * position;
}

MonolithicOscillator::MonolithicOscillator(const MassSubsystem::Params& mass,
                                           const SpringDamperSubsystem::Params& spring)
    : m_(mass.mass),
      k_(spring.stiffness),
      d_(spring.damping),
      x_(spring.extension),
      v_(mass.velocity) {
  if (!(m_ > 0.0) || !(k_ > 0.0) || !(d_ >= 0.0)) {
    throw configuration_error("oscillator parameters must be positive (damping >= 0)");
  }
}

void MonolithicOscillator::step(double dt) {
  const double f = -k_ * x_ - d_ * v_;
  dissipated_ += d_ * v_ * v_ * dt;
  x_ += v_ * dt;
  v_ += f / m_ * dt;
}

std::vector<double> MonolithicOscillator::outputs() const {
  return {v_, -k_ * x_ - d_ * v_};
}

double MonolithicOscillator::total_energy() const {
  return oscillator_energy(m_, k_, v_, x_);
}

bool MonolithicOscillator::state_finite() const {
  return std::isfinite(x_) && std::isfinite(v_) && std::isfinite(dissipated_);
}

std::unique_ptr<MonolithicModel> MonolithicOscillator::clone() const {
  return std::make_unique<MonolithicOscillator>(*this);
}

MonolithicQuarterCar::MonolithicQuarterCar(const ChassisSubsystem::Params& chassis,
                                           const SuspensionWheelSubsystem::Params& wheel)
    : mc_(chassis.mass),
      mw_(wheel.wheel_mass),
      kc_(wheel.suspension_stiffness),
      kw_(wheel.tyre_stiffness),
      dc_(wheel.suspension_damping),
      zc_(chassis.position),
      vc_(chassis.velocity),
      zw_(wheel.wheel_position),
      vw_(wheel.wheel_velocity) {
  if (!(mc_ > 0.0) || !(mw_ > 0.0) || !(kc_ > 0.0) || !(kw_ > 0.0) || !(dc_ > 0.0)) {
    throw configuration_error("quarter-car parameters must be positive");
  }
}

double MonolithicQuarterCar::suspension_force() const {
  return kc_ * (zw_ - zc_) + dc_ * (vw_ - vc_);
}

void MonolithicQuarterCar::step(double dt) {
  const double f = suspension_force();
  const double ac = f / mc_;
  const double aw = (-f - kw_ * zw_) / mw_;
  const double rel = vw_ - vc_;
  dissipated_ += dc_ * rel * rel * dt;
  zc_ += vc_ * dt;
  vc_ += ac * dt;
  zw_ += vw_ * dt;
  vw_ += aw * dt;
}

std::vector<double> MonolithicQuarterCar::outputs() const {
  return {vc_, suspension_force()};
}

double MonolithicQuarterCar::total_energy() const {
  const double stretch = zw_ - zc_;
  return 0.5 * mc_ * vc_ * vc_ + 0.5 * kc_ * stretch * stretch + 0.5 * mw_ * vw_ * vw_ +
         0.5 * kw_ * zw_ * zw_;
}

bool MonolithicQuarterCar::state_finite() const {
  return std::isfinite(zc_) && std::isfinite(vc_) && std::isfinite(zw_) &&
         std::isfinite(vw_) && std::isfinite(dissipated_);
}

std::unique_ptr<MonolithicModel> MonolithicQuarterCar::clone() const {
  return std::make_unique<MonolithicQuarterCar>(*this);
}

const MonolithicSample* MonolithicSeries::nearest(double t, double tolerance) const {
  if (samples.empty()) return nullptr;
  auto it = std::lower_bound(samples.begin(), samples.end(), t,
                             [](const MonolithicSample& s, double v) { return s.t < v; });
  const MonolithicSample* best = nullptr;
  double best_dist = tolerance;
  auto consider = [&](const MonolithicSample& s) {
    const double dist = std::abs(s.t - t);
    if (dist <= best_dist) {
      best = &s;
      best_dist = dist;
    }
  };
  if (it != samples.end()) consider(*it);
  if (it != samples.begin()) consider(*std::prev(it));
  return best;
}

namespace {

MonolithicSample sample_of(const MonolithicModel& model, double t, bool sync) {
  auto y = model.outputs();
  for (double v : y) {
    if (!std::isfinite(v) || std::abs(v) > divergence_bound) {
      throw divergence_error("monolithic model diverged at t=" + std::to_string(t), t);
    }
  }
  return {t, std::move(y), model.total_energy(), model.dissipated_energy(), sync};
}

}  // namespace

MonolithicSeries run_monolithic(const MonolithicModel& model, double t_stop, double dt,
                                std::span<const double> sample_times, double t_start) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw argument_error("monolithic solver step must be positive");
  }
  if (!(t_stop >= t_start) || !std::isfinite(t_stop)) {
    throw argument_error("monolithic run requires t_stop >= t_start");
  }

  std::vector<double> breaks;
  breaks.reserve(sample_times.size() + 1);
  for (double s : sample_times) {
    if (s > t_start && s < t_stop) breaks.push_back(s);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  if (t_stop > t_start) breaks.push_back(t_stop);

  auto m = model.clone();
  MonolithicSeries series;
  series.solver_dt = dt;
  series.samples.push_back(sample_of(*m, t_start, true));

  double t = t_start;
  for (double target : breaks) {
    const double h = target - t;
    const std::size_t n = micro_step_count(h, dt);
    for (std::size_t k = 0; k < n; ++k) {
      const bool last = k + 1 == n;
      m->step(last ? h - static_cast<double>(n - 1) * dt : dt);
      if (!m->state_finite()) {
        const double tf = last ? target : t + static_cast<double>(k + 1) * dt;
        throw divergence_error("monolithic model state became non-finite", tf);
      }
      const double ts = last ? target : t + static_cast<double>(k + 1) * dt;
      series.samples.push_back(sample_of(*m, ts, last));
    }
    t = target;
  }
  return series;
}

}  // namespace cosim
