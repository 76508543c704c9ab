#include "cosim/coupling_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cosim/error.hpp"

namespace cosim {

namespace {

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

void check_indices(const std::vector<std::size_t>& idx, std::size_t n, const char* what) {
  if (idx.empty() && n == 0) {
    throw configuration_error(std::string(what) + ": nothing to estimate");
  }
  for (auto i : idx) {
    if (i >= n) {
      throw configuration_error(std::string(what) + ": signal index " + std::to_string(i) +
                                " out of range");
    }
  }
}

int max_order(const std::vector<std::size_t>& idx, const std::vector<int>& orders) {
  int m = 0;
  for (auto i : idx) m = std::max(m, orders.at(i));
  return m;
}

}  // namespace

std::optional<std::vector<double>> extrapolated_inputs(const SyncContext& ctx) {
  const auto& topo = *ctx.topology;
  std::vector<double> u(ctx.u_held.begin(), ctx.u_held.end());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const int m = topo.input_order.empty() ? 0 : topo.input_order[j];
    if (m == 0) continue;
    const auto need = static_cast<std::size_t>(m) + 1;
    if (ctx.history->size() < need) return std::nullopt;
    std::vector<double> times(need);
    std::vector<double> values(need);
    for (std::size_t l = 0; l < need; ++l) {
      const auto& rec = ctx.history->back(need - 1 - l);
      times[l] = rec.t;
      values[l] = rec.u[j];
    }
    u[j] = lagrange_predict(times, values, ctx.t);
  }
  return u;
}

int bond_order(const PowerBond& bond, const CouplingTopology& topo) {
  int m = 0;
  for (const auto& port : bond.ports) {
    if (port.input < topo.input_order.size()) m = std::max(m, topo.input_order[port.input]);
  }
  return m;
}

std::vector<BondResidual> bond_residuals(const SyncContext& ctx,
                                         std::span<const double> u_tilde) {
  const auto& topo = *ctx.topology;
  std::vector<BondResidual> out;
  out.reserve(topo.bonds.size());
  for (const auto& bond : topo.bonds) {
    BondResidual r;
    r.label = bond.label;
    r.t = ctx.t;
    r.power = ecco_residual_power(bond, ctx.y, u_tilde);
    r.energy = ecco_residual_energy(r.power, ctx.h, bond_order(bond, topo));
    out.push_back(std::move(r));
  }
  return out;
}

// ---- NEPCE -----------------------------------------------------------------

std::vector<std::size_t> NepceEstimator::selected(const CouplingTopology& topo) const {
  return opts_.signals.empty() ? all_indices(topo.graph.n_inputs) : opts_.signals;
}

std::size_t NepceEstimator::signal_count(const CouplingTopology& topo) const {
  return selected(topo).size();
}

int NepceEstimator::indicator_order(const CouplingTopology& topo) const {
  return max_order(selected(topo), topo.input_order) + 1;
}

int NepceEstimator::predictor_order(const CouplingTopology& topo) const {
  return max_order(selected(topo), topo.input_order);
}

void NepceEstimator::check(const CouplingTopology& topo) const {
  check_indices(selected(topo), topo.graph.n_inputs, "nepce");
}

std::optional<ErrorSample> NepceEstimator::estimate(const SyncContext& ctx) const {
  const auto u_tilde = extrapolated_inputs(ctx);
  if (!u_tilde) return std::nullopt;
  auto du = nepce_input_error(ctx.u_new, *u_tilde);
  const auto& topo = *ctx.topology;
  if (opts_.feedthrough_correction && topo.jacobian.available) {
    du = nepce_feedthrough_correction(du, topo.graph, topo.jacobian);
  }
  ErrorSample s;
  for (auto j : selected(topo)) {
    s.errors.push_back(du[j]);
    s.reference.push_back(ctx.u_new[j]);
  }
  return s;
}

std::unique_ptr<CouplingErrorEstimator> NepceEstimator::clone() const {
  return std::make_unique<NepceEstimator>(*this);
}

// ---- Explicit predictor/corrector --------------------------------------------

std::vector<std::size_t> PredictorEstimator::selected(const CouplingTopology& topo) const {
  return opts_.signals.empty() ? all_indices(topo.graph.n_outputs) : opts_.signals;
}

std::size_t PredictorEstimator::signal_count(const CouplingTopology& topo) const {
  return selected(topo).size();
}

int PredictorEstimator::indicator_order(const CouplingTopology& topo) const {
  const auto idx = selected(topo);
  const int m = max_order(idx, topo.output_order);
  const bool feedthrough = std::any_of(idx.begin(), idx.end(), [&](std::size_t k) {
    return k < topo.output_feedthrough.size() && topo.output_feedthrough[k];
  });
  return feedthrough ? m + 1 : m + 2;
}

int PredictorEstimator::predictor_order(const CouplingTopology& topo) const {
  return max_order(selected(topo), topo.output_order) + 1;
}

void PredictorEstimator::check(const CouplingTopology& topo) const {
  check_indices(selected(topo), topo.graph.n_outputs, "predictor");
}

std::optional<ErrorSample> PredictorEstimator::estimate(const SyncContext& ctx) const {
  const auto& topo = *ctx.topology;
  ErrorSample s;
  for (auto k : selected(topo)) {
    const int r = topo.output_order[k] + 1;
    const auto dy = predictor_output_error(*ctx.history, k, ctx.y[k], ctx.t, r);
    if (!dy) return std::nullopt;
    s.errors.push_back(*dy);
    s.reference.push_back(ctx.y[k]);
  }
  return s;
}

std::unique_ptr<CouplingErrorEstimator> PredictorEstimator::clone() const {
  return std::make_unique<PredictorEstimator>(*this);
}

// ---- ECCO --------------------------------------------------------------------

std::vector<std::size_t> EccoEstimator::selected(const CouplingTopology& topo) const {
  return opts_.bonds.empty() ? all_indices(topo.bonds.size()) : opts_.bonds;
}

std::size_t EccoEstimator::signal_count(const CouplingTopology& topo) const {
  return selected(topo).size();
}

int EccoEstimator::indicator_order(const CouplingTopology& topo) const {
  int m = 0;
  for (auto b : selected(topo)) m = std::max(m, bond_order(topo.bonds.at(b), topo));
  return m + 2;
}

int EccoEstimator::predictor_order(const CouplingTopology& topo) const {
  return std::max(0, indicator_order(topo) - 2);
}

void EccoEstimator::check(const CouplingTopology& topo) const {
  if (topo.bonds.empty()) throw configuration_error("ecco requires at least one power bond");
  check_indices(selected(topo), topo.bonds.size(), "ecco");
}

std::optional<ErrorSample> EccoEstimator::estimate(const SyncContext& ctx) const {
  const auto u_tilde = extrapolated_inputs(ctx);
  if (!u_tilde) return std::nullopt;
  const auto& topo = *ctx.topology;
  ErrorSample s;
  for (auto b : selected(topo)) {
    const auto& bond = topo.bonds[b];
    const double dp = ecco_residual_power(bond, ctx.y, *u_tilde);
    s.errors.push_back(ecco_residual_energy(dp, ctx.h, bond_order(bond, topo)));
    double transmitted = 0.0;
    for (const auto& port : bond.ports) {
      transmitted += std::abs(ctx.y[port.output] * (*u_tilde)[port.input]);
    }
    s.reference.push_back(0.5 * ctx.h * transmitted);
  }
  return s;
}

std::unique_ptr<CouplingErrorEstimator> EccoEstimator::clone() const {
  return std::make_unique<EccoEstimator>(*this);
}

}  // namespace cosim
