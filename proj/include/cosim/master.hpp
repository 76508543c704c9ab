#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cosim/connection_graph.hpp"
#include "cosim/controller.hpp"
#include "cosim/coupling_estimator.hpp"
#include "cosim/indicator.hpp"
#include "cosim/monolithic.hpp"
#include "cosim/power_bond.hpp"
#include "cosim/signal.hpp"
#include "cosim/subsystem.hpp"

namespace cosim {

enum class Mode { fixed, adaptive };

/// One synchronization point of a co-simulation run.
struct StepRecord {
  double t = 0.0;
  /// Length of the macro step that ended at t (0 for the initial record).
  double dt = 0.0;
  /// Inputs computed at this point, L y; applied during the next step.
  std::vector<double> u;
  std::vector<double> y;
  double eps = 0.0;
  /// Per bond residual power [W] and energy [J].
  std::vector<double> bond_power;
  std::vector<double> bond_energy;
  /// Sum of subsystem stored energies, when every subsystem reports one.
  std::optional<double> energy;
  double dissipated = 0.0;
  bool diverged = false;
};

struct StepRecordSink {
  std::function<void(const StepRecord&)> on_record;
};

/// A complete co-simulation setup. Subsystems are prototypes; every run works
/// on fresh clones, so a Scenario can be run repeatedly.
struct Scenario {
  std::string name;
  std::vector<std::shared_ptr<const Subsystem>> subsystems;
  ConnectionGraph graph;
  std::vector<PowerBond> bonds;
  /// Initial inputs. When absent, L y(t_start) is used, with the initial
  /// outputs read before any input is set.
  std::optional<std::vector<double>> u_start;
  double t_start = 0.0;
  double t_stop = 1.0;
  Mode mode = Mode::fixed;
  /// Macro step in fixed mode.
  double dt = 0.05;
  ControllerConfig controller;
  /// Error estimator; ε is reported as 0 when null.
  std::shared_ptr<const CouplingErrorEstimator> estimator;
  ToleranceSet tolerances;
  AggregationKind aggregation = AggregationKind::rmse;
  /// Step subsystems on worker threads. Results are identical to sequential mode.
  bool parallel = false;
  StepRecordSink sink;
  /// Monolithic counterpart used as oracle, if one exists.
  std::shared_ptr<const MonolithicModel> reference;
};

struct RunResult {
  std::shared_ptr<const SignalLayout> input_layout;
  std::shared_ptr<const SignalLayout> output_layout;
  std::vector<std::string> bond_labels;
  std::vector<StepRecord> records;
  std::optional<double> diverged_at;
  std::string divergence_message;
  std::vector<std::string> warnings;

  /// Number of macro steps taken.
  [[nodiscard]] std::size_t steps() const noexcept {
    return records.empty() ? 0 : records.size() - 1;
  }
  [[nodiscard]] bool diverged() const noexcept { return diverged_at.has_value(); }
};

/// Builds the coupling topology of a scenario and checks every scenario
/// invariant; throws configuration_error listing all violations.
[[nodiscard]] CouplingTopology build_topology(const Scenario& scenario);
void validate_scenario(const Scenario& scenario);

/// Fixed-step Jacobi co-simulation. Synchronization times are
/// t_start + k dt with the last one exactly t_stop. A divergence ends the run
/// early; the result then holds the partial records and `diverged_at`.
[[nodiscard]] RunResult run_fixed(const Scenario& scenario);

/// Jacobi co-simulation with the macro step chosen by the PI controller from
/// the error indicator of the previous step.
[[nodiscard]] RunResult run_adaptive(const Scenario& scenario);

/// Dispatches on scenario.mode.
[[nodiscard]] RunResult run(const Scenario& scenario);

/// Output errors of a co-simulation against the monolithic reference at each
/// synchronization point.
struct Comparison {
  std::vector<double> t;
  /// dy[i][k] = y_k[i] - y0_k[i].
  std::vector<std::vector<double>> dy;
  std::vector<double> energy_cosim;
  std::vector<double> energy_mono;
  std::vector<double> energy_error;
  std::vector<double> dissipated_cosim;
  std::vector<double> dissipated_mono;
};

/// Throws argument_error when a record has no reference sample within one
/// solver step of its time, or when output counts differ.
[[nodiscard]] Comparison compare_with_reference(const RunResult& run,
                                                const MonolithicSeries& reference);

/// Runs the scenario's monolithic reference sampled at the run's
/// synchronization times. Throws configuration_error when there is none.
[[nodiscard]] MonolithicSeries reference_for(const Scenario& scenario, const RunResult& run,
                                             double solver_dt);

}  // namespace cosim
