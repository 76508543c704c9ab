#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cosim/connection_graph.hpp"
#include "cosim/estimators.hpp"
#include "cosim/power_bond.hpp"
#include "cosim/step_history.hpp"

namespace cosim {

/// Static coupling structure the master derives from a scenario.
struct CouplingTopology {
  ConnectionGraph graph;
  std::vector<PowerBond> bonds;
  SignalOwnership owners;
  /// Extrapolation order m of the subsystem owning each input / output.
  std::vector<int> input_order;
  std::vector<int> output_order;
  /// Per output: true when it depends directly on an input of its subsystem.
  std::vector<bool> output_feedthrough;
  FeedthroughModel jacobian;
};

/// Everything known at synchronization point i, after the outputs are read.
struct SyncContext {
  double t = 0.0;
  /// Length of the macro step that ended at t.
  double h = 0.0;
  /// Inputs applied during that step.
  std::span<const double> u_held;
  /// New inputs L y[i].
  std::span<const double> u_new;
  std::span<const double> y;
  /// Records of points up to i - 1.
  const StepHistory* history = nullptr;
  const CouplingTopology* topology = nullptr;
};

/// Local errors for the estimated signals together with the signal values
/// their relative tolerances refer to.
struct ErrorSample {
  std::vector<double> errors;
  std::vector<double> reference;
};

/// Inputs as extrapolated inside each subsystem at `ctx.t`: the held values
/// under zero-order hold, otherwise the Lagrange extrapolation of order m
/// over past inputs. nullopt while history is too short.
[[nodiscard]] std::optional<std::vector<double>> extrapolated_inputs(const SyncContext& ctx);

/// Residual power and energy of every bond at `ctx`.
[[nodiscard]] std::vector<BondResidual> bond_residuals(const SyncContext& ctx,
                                                       std::span<const double> u_tilde);

/// Plug-in local coupling-error estimator used by the master loop.
class CouplingErrorEstimator {
public:
  virtual ~CouplingErrorEstimator() = default;

  [[nodiscard]] virtual std::string name() const = 0;
  /// Number of error signals produced, i.e. the required tolerance count.
  [[nodiscard]] virtual std::size_t signal_count(const CouplingTopology& topo) const = 0;
  /// Order p of the estimate in the macro step size.
  [[nodiscard]] virtual int indicator_order(const CouplingTopology& topo) const = 0;
  /// Largest Lagrange predictor order used (sizes the step history).
  [[nodiscard]] virtual int predictor_order(const CouplingTopology&) const { return 0; }
  /// Throws configuration_error when the estimator cannot run on `topo`.
  virtual void check(const CouplingTopology& topo) const = 0;

  /// Estimate at one synchronization point; nullopt during warm-up.
  [[nodiscard]] virtual std::optional<ErrorSample> estimate(const SyncContext& ctx) const = 0;

  [[nodiscard]] virtual std::unique_ptr<CouplingErrorEstimator> clone() const = 0;
};

/// Local input errors u - u~ (NEPCE), optionally corrected for direct
/// feed-through when the subsystems expose interface Jacobian entries.
class NepceEstimator final : public CouplingErrorEstimator {
public:
  struct Options {
    /// Global input indices to estimate; empty means all inputs.
    std::vector<std::size_t> signals;
    bool feedthrough_correction = false;
  };

  NepceEstimator() = default;
  explicit NepceEstimator(Options opts) : opts_(std::move(opts)) {}

  [[nodiscard]] std::string name() const override { return "nepce"; }
  [[nodiscard]] std::size_t signal_count(const CouplingTopology& topo) const override;
  [[nodiscard]] int indicator_order(const CouplingTopology& topo) const override;
  [[nodiscard]] int predictor_order(const CouplingTopology& topo) const override;
  void check(const CouplingTopology& topo) const override;
  [[nodiscard]] std::optional<ErrorSample> estimate(const SyncContext& ctx) const override;
  [[nodiscard]] std::unique_ptr<CouplingErrorEstimator> clone() const override;

private:
  [[nodiscard]] std::vector<std::size_t> selected(const CouplingTopology& topo) const;
  Options opts_;
};

/// Local output errors y - y~ against a Lagrange prediction of order m + 1.
class PredictorEstimator final : public CouplingErrorEstimator {
public:
  struct Options {
    /// Global output indices to estimate; empty means all outputs.
    std::vector<std::size_t> signals;
  };

  PredictorEstimator() = default;
  explicit PredictorEstimator(Options opts) : opts_(std::move(opts)) {}

  [[nodiscard]] std::string name() const override { return "predictor"; }
  [[nodiscard]] std::size_t signal_count(const CouplingTopology& topo) const override;
  [[nodiscard]] int indicator_order(const CouplingTopology& topo) const override;
  [[nodiscard]] int predictor_order(const CouplingTopology& topo) const override;
  void check(const CouplingTopology& topo) const override;
  [[nodiscard]] std::optional<ErrorSample> estimate(const SyncContext& ctx) const override;
  [[nodiscard]] std::unique_ptr<CouplingErrorEstimator> clone() const override;

private:
  [[nodiscard]] std::vector<std::size_t> selected(const CouplingTopology& topo) const;
  Options opts_;
};

/// Residual energies over power bonds (ECCO). Errors are per bond; the
/// reference value of a bond is the energy its ports transmitted during the
/// step, h * sum_k |y_k u~_k| / 2.
class EccoEstimator final : public CouplingErrorEstimator {
public:
  struct Options {
    /// Bond indices to estimate; empty means all bonds.
    std::vector<std::size_t> bonds;
  };

  EccoEstimator() = default;
  explicit EccoEstimator(Options opts) : opts_(std::move(opts)) {}

  [[nodiscard]] std::string name() const override { return "ecco"; }
  [[nodiscard]] std::size_t signal_count(const CouplingTopology& topo) const override;
  [[nodiscard]] int indicator_order(const CouplingTopology& topo) const override;
  [[nodiscard]] int predictor_order(const CouplingTopology& topo) const override;
  void check(const CouplingTopology& topo) const override;
  [[nodiscard]] std::optional<ErrorSample> estimate(const SyncContext& ctx) const override;
  [[nodiscard]] std::unique_ptr<CouplingErrorEstimator> clone() const override;

private:
  [[nodiscard]] std::vector<std::size_t> selected(const CouplingTopology& topo) const;
  Options opts_;
};

/// Extrapolation order of a bond: the largest order among its inputs.
[[nodiscard]] int bond_order(const PowerBond& bond, const CouplingTopology& topo);

}  // namespace cosim
