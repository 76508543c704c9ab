#include "cosim/master.hpp"

#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "cosim/error.hpp"

namespace cosim {

namespace {

struct Slice {
  std::size_t in_offset = 0;
  std::size_t n_in = 0;
  std::size_t out_offset = 0;
  std::size_t n_out = 0;
};

std::vector<Slice> slices_of(const std::vector<std::shared_ptr<const Subsystem>>& subs) {
  std::vector<Slice> slices;
  std::size_t in = 0;
  std::size_t out = 0;
  for (const auto& s : subs) {
    Slice sl{in, s->inputs().size(), out, s->outputs().size()};
    in += sl.n_in;
    out += sl.n_out;
    slices.push_back(sl);
  }
  return slices;
}

[[noreturn]] void throw_problems(const std::vector<std::string>& problems) {
  std::ostringstream msg;
  msg << "invalid scenario:";
  for (const auto& p : problems) msg << "\n  - " << p;
  throw configuration_error(msg.str());
}

std::size_t fixed_step_count(double span, double dt) {
  const double ratio = span / dt;
  const auto n = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
  return n == 0 ? 1 : n;
}

class Runner {
public:
  explicit Runner(const Scenario& sc) : sc_(sc), topo_(build_topology(sc)) {
    validate_scenario(sc);
    for (const auto& proto : sc.subsystems) subs_.push_back(proto->clone());
    slices_ = slices_of(sc.subsystems);

    auto in_layout = std::make_shared<SignalLayout>();
    auto out_layout = std::make_shared<SignalLayout>();
    for (const auto& s : subs_) {
      for (const auto& info : s->inputs()) {
        in_layout->slots.push_back({s->name() + "." + info.label, info.unit});
      }
      for (const auto& info : s->outputs()) {
        out_layout->slots.push_back({s->name() + "." + info.label, info.unit});
      }
    }
    result_.input_layout = std::move(in_layout);
    result_.output_layout = std::move(out_layout);
    for (std::size_t b = 0; b < sc.bonds.size(); ++b) {
      result_.bond_labels.push_back(sc.bonds[b].label.empty() ? "bond" + std::to_string(b)
                                                              : sc.bonds[b].label);
    }

    int order = 0;
    if (sc.estimator) order = sc.estimator->predictor_order(topo_);
    for (const auto& s : subs_) order = std::max(order, s->extrapolation_order());
    history_.emplace(StepHistory::for_predictor_order(order));
  }

  RunResult run(Mode mode) {
    double t = sc_.t_start;
    std::vector<double> y = read_outputs();
    std::vector<double> u =
        sc_.u_start ? *sc_.u_start : apply_connections(topo_.graph, y);

    StepRecord first;
    first.t = t;
    first.u = u;
    first.y = y;
    first.bond_power.assign(sc_.bonds.size(), 0.0);
    first.bond_energy.assign(sc_.bonds.size(), 0.0);
    fill_energy(first);
    emit(std::move(first));
    history_->push({t, 0.0, u, y, 0.0});

    std::optional<PiController> controller;
    double dt = sc_.dt;
    std::size_t n_fixed = 0;
    if (mode == Mode::adaptive) {
      controller.emplace(sc_.controller);
      dt = sc_.controller.dt_start;
    } else if (sc_.t_stop > sc_.t_start) {
      n_fixed = fixed_step_count(sc_.t_stop - sc_.t_start, sc_.dt);
    }

    std::size_t step = 0;
    while (t < sc_.t_stop) {
      set_inputs(u);

      double t_next = 0.0;
      if (mode == Mode::fixed) {
        t_next = step + 1 >= n_fixed
                     ? sc_.t_stop
                     : std::min(sc_.t_start + static_cast<double>(step + 1) * sc_.dt,
                                sc_.t_stop);
      } else {
        t_next = t + dt;
        if (t_next >= sc_.t_stop || sc_.t_stop - t_next <= 1e-9 * dt) t_next = sc_.t_stop;
      }
      const double h = t_next - t;

      if (auto failure = step_all(h)) {
        record_divergence(t_next, h, u, failure->first, failure->second);
        break;
      }
      t = t_next;
      ++step;

      y = read_outputs();
      const auto u_new = apply_connections(topo_.graph, y);

      SyncContext ctx;
      ctx.t = t;
      ctx.h = h;
      ctx.u_held = u;
      ctx.u_new = u_new;
      ctx.y = y;
      ctx.history = &*history_;
      ctx.topology = &topo_;

      StepRecord rec;
      rec.t = t;
      rec.dt = h;
      rec.u = u_new;
      rec.y = y;
      fill_energy(rec);

      if (!all_finite(y) || exceeds_bound(y)) {
        rec.diverged = true;
        rec.bond_power.assign(sc_.bonds.size(), 0.0);
        rec.bond_energy.assign(sc_.bonds.size(), 0.0);
        result_.diverged_at = t;
        result_.divergence_message =
            "outputs exceeded the divergence bound at t=" + std::to_string(t);
        emit(std::move(rec));
        break;
      }

      if (const auto u_tilde = extrapolated_inputs(ctx)) {
        for (const auto& r : bond_residuals(ctx, *u_tilde)) {
          rec.bond_power.push_back(r.power);
          rec.bond_energy.push_back(r.energy);
        }
      } else {
        rec.bond_power.assign(sc_.bonds.size(), 0.0);
        rec.bond_energy.assign(sc_.bonds.size(), 0.0);
      }

      rec.eps = indicator(ctx);

      if (controller) {
        try {
          dt = controller->next(dt, rec.eps);
        } catch (const controller_error& e) {
          throw controller_error("step " + std::to_string(step) + " (t=" + std::to_string(t) +
                                 "): " + e.what());
        }
      }

      history_->push({t, 0.0, u_new, y, rec.eps});
      emit(std::move(rec));
      u = u_new;
    }

    if (controller && controller->state().clamp_conflicts > 0) {
      result_.warnings.push_back(
          "rate limit theta_max * dt_old fell below dt_min on " +
          std::to_string(controller->state().clamp_conflicts) + " step(s); dt_min was used");
    }
    return std::move(result_);
  }

private:
  std::vector<double> read_outputs() const {
    std::vector<double> y(topo_.graph.n_outputs);
    for (std::size_t s = 0; s < subs_.size(); ++s) {
      subs_[s]->get_outputs(std::span<double>(y).subspan(slices_[s].out_offset, slices_[s].n_out));
    }
    return y;
  }

  void set_inputs(const std::vector<double>& u) {
    const std::span<const double> all(u);
    for (std::size_t s = 0; s < subs_.size(); ++s) {
      subs_[s]->set_inputs(all.subspan(slices_[s].in_offset, slices_[s].n_in));
    }
  }

  // Returns the failure time and message of the first diverging subsystem.
  std::optional<std::pair<double, std::string>> step_all(double h) {
    std::vector<std::exception_ptr> errors(subs_.size());
    if (sc_.parallel && subs_.size() > 1) {
      std::vector<std::jthread> workers;
      workers.reserve(subs_.size());
      for (std::size_t s = 0; s < subs_.size(); ++s) {
        workers.emplace_back([this, s, h, &errors] {
          try {
            subs_[s]->do_step(h);
          } catch (...) {
            errors[s] = std::current_exception();
          }
        });
      }
    } else {
      for (std::size_t s = 0; s < subs_.size(); ++s) {
        try {
          subs_[s]->do_step(h);
        } catch (...) {
          errors[s] = std::current_exception();
        }
      }
    }
    for (auto& err : errors) {
      if (!err) continue;
      try {
        std::rethrow_exception(err);
      } catch (const divergence_error& e) {
        return std::make_pair(e.time(), std::string(e.what()));
      }
    }
    return std::nullopt;
  }

  void record_divergence(double t, double h, const std::vector<double>& u, double at,
                         const std::string& what) {
    StepRecord rec;
    rec.t = t;
    rec.dt = h;
    rec.y = read_outputs();
    rec.u = u;
    rec.bond_power.assign(sc_.bonds.size(), 0.0);
    rec.bond_energy.assign(sc_.bonds.size(), 0.0);
    rec.diverged = true;
    fill_energy(rec);
    result_.diverged_at = at;
    result_.divergence_message = what;
    emit(std::move(rec));
  }

  static bool exceeds_bound(const std::vector<double>& y) {
    for (double v : y) {
      if (std::abs(v) > divergence_bound) return true;
    }
    return false;
  }

  void fill_energy(StepRecord& rec) const {
    double total = 0.0;
    bool complete = true;
    double dissipated = 0.0;
    for (const auto& s : subs_) {
      if (const auto e = s->stored_energy()) {
        total += *e;
      } else {
        complete = false;
      }
      dissipated += s->dissipated_energy();
    }
    if (complete && !subs_.empty()) rec.energy = total;
    rec.dissipated = dissipated;
  }

  double indicator(const SyncContext& ctx) const {
    if (!sc_.estimator) return 0.0;
    const auto sample = sc_.estimator->estimate(ctx);
    if (!sample) return 0.0;
    const auto eps = normalize(sample->errors, sample->reference, sc_.tolerances);
    return aggregate(eps, sc_.aggregation);
  }

  void emit(StepRecord rec) {
    if (sc_.sink.on_record) sc_.sink.on_record(rec);
    result_.records.push_back(std::move(rec));
  }

  const Scenario& sc_;
  CouplingTopology topo_;
  std::vector<std::unique_ptr<Subsystem>> subs_;
  std::vector<Slice> slices_;
  std::optional<StepHistory> history_;
  RunResult result_;
};

}  // namespace

CouplingTopology build_topology(const Scenario& scenario) {
  CouplingTopology topo;
  topo.graph = scenario.graph;
  topo.bonds = scenario.bonds;
  std::size_t n_in = 0;
  std::size_t n_out = 0;
  for (std::size_t s = 0; s < scenario.subsystems.size(); ++s) {
    const auto& sub = *scenario.subsystems[s];
    const int m = sub.extrapolation_order();
    const auto ft = sub.feedthrough();
    for (std::size_t j = 0; j < sub.inputs().size(); ++j) {
      topo.owners.input_owner.push_back(s);
      topo.input_order.push_back(m);
    }
    for (std::size_t k = 0; k < sub.outputs().size(); ++k) {
      topo.owners.output_owner.push_back(s);
      topo.output_order.push_back(m);
      topo.output_feedthrough.push_back(false);
    }
    for (const auto& e : ft) {
      if (e.output >= sub.outputs().size() || e.input >= sub.inputs().size()) {
        throw configuration_error(sub.name() + ": feed-through entry out of range");
      }
      topo.output_feedthrough[n_out + e.output] = true;
      if (e.derivative) {
        topo.jacobian.entries.push_back({n_out + e.output, n_in + e.input, *e.derivative});
      }
    }
    n_in += sub.inputs().size();
    n_out += sub.outputs().size();
  }
  topo.jacobian.n_inputs = n_in;
  topo.jacobian.n_outputs = n_out;
  // Available when every declared feed-through path carries a derivative.
  bool available = true;
  for (const auto& sub : scenario.subsystems) {
    for (const auto& e : sub->feedthrough()) available = available && e.derivative.has_value();
  }
  topo.jacobian.available = available;
  return topo;
}

void validate_scenario(const Scenario& sc) {
  std::vector<std::string> problems;
  if (sc.subsystems.empty()) problems.push_back("scenario has no subsystems");
  for (const auto& s : sc.subsystems) {
    if (!s) problems.push_back("null subsystem");
  }
  if (!problems.empty()) throw_problems(problems);

  const auto topo = build_topology(sc);
  const auto n_in = topo.owners.input_owner.size();
  const auto n_out = topo.owners.output_owner.size();
  for (auto& p : validate_graph(sc.graph, n_in, n_out)) problems.push_back(std::move(p));
  if (problems.empty()) {
    for (const auto& bond : sc.bonds) {
      for (auto& p : validate_bond(bond, sc.graph, topo.owners)) problems.push_back(std::move(p));
    }
  }
  if (!std::isfinite(sc.t_start) || !std::isfinite(sc.t_stop)) {
    problems.push_back("t_start and t_stop must be finite");
  } else if (sc.t_stop < sc.t_start) {
    problems.push_back("t_stop must not be earlier than t_start");
  }
  if (sc.u_start) {
    if (sc.u_start->size() != n_in) {
      problems.push_back("u_start has " + std::to_string(sc.u_start->size()) +
                         " entries, expected " + std::to_string(n_in));
    } else if (!all_finite(*sc.u_start)) {
      problems.push_back("u_start must be finite");
    }
  }
  if (sc.mode == Mode::fixed) {
    if (!(sc.dt > 0.0) || !std::isfinite(sc.dt)) problems.push_back("dt must be positive");
  } else {
    try {
      sc.controller.validate();
    } catch (const configuration_error& e) {
      problems.emplace_back(e.what());
    }
  }
  if (sc.estimator && problems.empty()) {
    try {
      sc.estimator->check(topo);
      sc.tolerances.validate();
      const auto need = sc.estimator->signal_count(topo);
      if (sc.tolerances.size() != need) {
        problems.push_back("estimator '" + sc.estimator->name() + "' needs " +
                           std::to_string(need) + " tolerances, got " +
                           std::to_string(sc.tolerances.size()));
      }
    } catch (const configuration_error& e) {
      problems.emplace_back(e.what());
    }
  }
  if (sc.mode == Mode::adaptive && !sc.estimator) {
    problems.push_back("adaptive mode requires an error estimator");
  }
  if (!problems.empty()) throw_problems(problems);
}

RunResult run_fixed(const Scenario& scenario) {
  if (scenario.mode != Mode::fixed) throw configuration_error("run_fixed: scenario mode is not fixed");
  return Runner(scenario).run(Mode::fixed);
}

RunResult run_adaptive(const Scenario& scenario) {
  if (scenario.mode != Mode::adaptive) {
    throw configuration_error("run_adaptive: scenario mode is not adaptive");
  }
  return Runner(scenario).run(Mode::adaptive);
}

RunResult run(const Scenario& scenario) {
  return scenario.mode == Mode::fixed ? run_fixed(scenario) : run_adaptive(scenario);
}

Comparison compare_with_reference(const RunResult& run, const MonolithicSeries& reference) {
  Comparison cmp;
  const double tol = reference.solver_dt;
  for (const auto& rec : run.records) {
    const auto* s = reference.nearest(rec.t, tol);
    if (!s) {
      throw argument_error("no reference sample within " + std::to_string(tol) +
                           " s of t=" + std::to_string(rec.t));
    }
    if (s->outputs.size() != rec.y.size()) {
      throw argument_error("reference has " + std::to_string(s->outputs.size()) +
                           " outputs, co-simulation has " + std::to_string(rec.y.size()));
    }
    std::vector<double> dy(rec.y.size());
    for (std::size_t k = 0; k < dy.size(); ++k) dy[k] = rec.y[k] - s->outputs[k];
    cmp.t.push_back(rec.t);
    cmp.dy.push_back(std::move(dy));
    const double e_cosim = rec.energy.value_or(std::nan(""));
    cmp.energy_cosim.push_back(e_cosim);
    cmp.energy_mono.push_back(s->energy);
    cmp.energy_error.push_back(e_cosim - s->energy);
    cmp.dissipated_cosim.push_back(rec.dissipated);
    cmp.dissipated_mono.push_back(s->dissipated);
  }
  return cmp;
}

MonolithicSeries reference_for(const Scenario& scenario, const RunResult& run,
                               double solver_dt) {
  if (!scenario.reference) {
    throw configuration_error("scenario '" + scenario.name + "' has no monolithic reference");
  }
  std::vector<double> times;
  times.reserve(run.records.size());
  for (const auto& r : run.records) times.push_back(r.t);
  const double t_stop = times.empty() ? scenario.t_start : times.back();
  return run_monolithic(*scenario.reference, t_stop, solver_dt, times, scenario.t_start);
}

}  // namespace cosim
