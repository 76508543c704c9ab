#include "cosim/estimators.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numeric>

#include "cosim/error.hpp"
#include "cosim/signal.hpp"

namespace cosim {

std::vector<double> nepce_input_error(std::span<const double> u_now,
                                      std::span<const double> u_prev) {
  require_same_length(u_now, u_prev, "nepce_input_error");
  std::vector<double> du(u_now.size());
  for (std::size_t i = 0; i < du.size(); ++i) du[i] = u_now[i] - u_prev[i];
  return du;
}

std::vector<double> nepce_feedthrough_correction(std::span<const double> du_raw,
                                                 const ConnectionGraph& graph,
                                                 const FeedthroughModel& ft) {
  if (!ft.available) {
    throw estimator_error("feed-through correction requested without an interface Jacobian");
  }
  const auto n_in = graph.n_inputs;
  const auto n_out = graph.n_outputs;
  if (du_raw.size() != n_in) {
    throw argument_error("nepce_feedthrough_correction: expected " + std::to_string(n_in) +
                         " input errors, got " + std::to_string(du_raw.size()));
  }
  if (ft.entries.empty()) return {du_raw.begin(), du_raw.end()};

  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_out),
                                              static_cast<Eigen::Index>(n_in));
  for (const auto& e : ft.entries) {
    if (e.output >= n_out || e.input >= n_in || !std::isfinite(e.value)) {
      throw estimator_error("invalid interface Jacobian entry");
    }
    jac(static_cast<Eigen::Index>(e.output), static_cast<Eigen::Index>(e.input)) += e.value;
  }
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_in),
                                            static_cast<Eigen::Index>(n_out));
  for (const auto& c : graph.entries) {
    L(static_cast<Eigen::Index>(c.input), static_cast<Eigen::Index>(c.output)) = c.sign;
  }

  const Eigen::MatrixXd A =
      Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n_in),
                                static_cast<Eigen::Index>(n_in)) -
      L * jac;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  const double rcond = lu.rcond();
  if (!lu.isInvertible() || !(rcond >= 1e-12)) {
    throw estimator_error(
        "feed-through correction matrix (I - L J) is singular; use the uncorrected "
        "input error instead");
  }
  const Eigen::Map<const Eigen::VectorXd> rhs(du_raw.data(),
                                              static_cast<Eigen::Index>(du_raw.size()));
  const Eigen::VectorXd du = lu.solve(rhs);
  return {du.data(), du.data() + du.size()};
}

std::vector<double> lagrange_weights(std::span<const double> times, double t_target) {
  const std::size_t n = times.size();
  std::vector<double> w(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t l = 0; l < n; ++l) {
      if (l == j) continue;
      const double denom = times[j] - times[l];
      if (denom == 0.0) throw argument_error("lagrange: duplicate sample times");
      w[j] *= (t_target - times[l]) / denom;
    }
  }
  return w;
}

double lagrange_predict(std::span<const double> times, std::span<const double> values,
                        double t_target) {
  require_same_length(times, values, "lagrange_predict");
  if (times.size() < 2) throw argument_error("lagrange_predict: order r must be >= 1");
  for (std::size_t j = 1; j < times.size(); ++j) {
    if (times[j] == times[j - 1]) throw argument_error("lagrange: duplicate sample times");
    if (!(times[j] > times[j - 1])) {
      throw argument_error("lagrange: sample times must be strictly increasing");
    }
  }
  if (!(t_target > times.back())) {
    throw argument_error("lagrange_predict: target must lie after the latest sample");
  }
  const auto w = lagrange_weights(times, t_target);
  double acc = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) acc += values[j] * w[j];
  return acc;
}

double predictor_output_error(std::span<const double> times, std::span<const double> values,
                              double y_now, double t_now) {
  return y_now - lagrange_predict(times, values, t_now);
}

std::optional<double> predictor_output_error(const StepHistory& history, std::size_t k,
                                             double y_now, double t_now, int r) {
  if (r < 1) throw argument_error("predictor order must be >= 1");
  const auto need = static_cast<std::size_t>(r) + 1;
  if (history.size() < need) return std::nullopt;
  std::vector<double> times(need);
  std::vector<double> values(need);
  for (std::size_t j = 0; j < need; ++j) {
    const auto& rec = history.back(need - 1 - j);
    if (k >= rec.y.size()) throw argument_error("predictor: output index out of range");
    times[j] = rec.t;
    values[j] = rec.y[k];
  }
  return predictor_output_error(times, values, y_now, t_now);
}

double ecco_residual_power(const PowerBond& bond, std::span<const double> y,
                           std::span<const double> u_tilde) {
  double sum = 0.0;
  for (const auto& port : bond.ports) {
    if (port.output >= y.size() || port.input >= u_tilde.size()) {
      throw argument_error("ecco_residual_power: port index out of range");
    }
    sum += port.orientation * y[port.output] * u_tilde[port.input];
  }
  return -sum;
}

double ecco_residual_energy(double residual_power, double dt, int m) {
  if (!(dt > 0.0)) throw argument_error("ecco_residual_energy: dt must be positive");
  if (m < 0) throw argument_error("ecco_residual_energy: extrapolation order must be >= 0");
  return residual_power * dt / static_cast<double>(m + 2);
}

double ecco_total_residual(std::span<const BondResidual> residuals) {
  return std::accumulate(residuals.begin(), residuals.end(), 0.0,
                         [](double acc, const BondResidual& r) { return acc + r.energy; });
}

}  // namespace cosim
