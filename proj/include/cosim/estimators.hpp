#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cosim/connection_graph.hpp"
#include "cosim/power_bond.hpp"
#include "cosim/step_history.hpp"

namespace cosim {

// ---- NEPCE: local input errors ---------------------------------------------

/// Local input error under zero-order hold: u[i] - u[i-1], elementwise.
[[nodiscard]] std::vector<double> nepce_input_error(std::span<const double> u_now,
                                                    std::span<const double> u_prev);

/// Sparse interface Jacobian J_y with entries d y_output / d u_input in global
/// indices.
struct FeedthroughModel {
  struct Entry {
    std::size_t output = 0;
    std::size_t input = 0;
    double value = 0.0;
  };

  std::vector<Entry> entries;
  std::size_t n_outputs = 0;
  std::size_t n_inputs = 0;
  bool available = false;
};

/// Solves (I - L J_y) du = du_raw for the feed-through-corrected input error.
/// Returns du_raw unchanged when J_y has no entries. Throws estimator_error
/// when the model is unavailable or the system is singular (reciprocal
/// condition estimate below 1e-12); the uncorrected estimate is the fallback.
[[nodiscard]] std::vector<double> nepce_feedthrough_correction(
    std::span<const double> du_raw, const ConnectionGraph& graph, const FeedthroughModel& ft);

// ---- Explicit predictor/corrector: local output errors ---------------------

/// Lagrange basis weights L_j(t_target) over the sample times.
[[nodiscard]] std::vector<double> lagrange_weights(std::span<const double> times,
                                                   double t_target);

/// Extrapolates the polynomial of order r = times.size() - 1 through the
/// samples to `t_target`. Requires r >= 1, distinct strictly increasing times,
/// and t_target after the latest sample.
[[nodiscard]] double lagrange_predict(std::span<const double> times,
                                      std::span<const double> values, double t_target);

/// y_now minus the Lagrange prediction from the past samples.
[[nodiscard]] double predictor_output_error(std::span<const double> times,
                                            std::span<const double> values, double y_now,
                                            double t_now);

/// Output error for output `k` using the r + 1 most recent history records,
/// or nullopt while the history is still warming up.
[[nodiscard]] std::optional<double> predictor_output_error(const StepHistory& history,
                                                           std::size_t k, double y_now,
                                                           double t_now, int r);

// ---- ECCO: energy residuals ------------------------------------------------

/// Residual power over one bond at a synchronization point,
/// dP = -sum_k o_k y_k u~_k. Positive means energy is being added spuriously.
[[nodiscard]] double ecco_residual_power(const PowerBond& bond, std::span<const double> y,
                                         std::span<const double> u_tilde);

/// Residual energy over the macro step ending at the point where dP was
/// sampled: dP * dt / (m + 2).
[[nodiscard]] double ecco_residual_energy(double residual_power, double dt, int m);

struct BondResidual {
  std::string label;
  double power = 0.0;   ///< W
  double energy = 0.0;  ///< J
  double t = 0.0;
};

[[nodiscard]] double ecco_total_residual(std::span<const BondResidual> residuals);

}  // namespace cosim
