#include "cosim/indicator.hpp"

#include <cmath>
#include <string>

#include "cosim/error.hpp"
#include "cosim/signal.hpp"

namespace cosim {

void ToleranceSet::validate() const {
  if (absolute.size() != relative.size()) {
    throw configuration_error("tolerance lists differ in length");
  }
  for (std::size_t k = 0; k < absolute.size(); ++k) {
    const double a = absolute[k];
    const double r = relative[k];
    if (!std::isfinite(a) || !std::isfinite(r) || a < 0.0 || r < 0.0) {
      throw configuration_error("tolerances for signal " + std::to_string(k) +
                                " must be finite and non-negative");
    }
    if (!(a + r > 0.0)) {
      throw configuration_error("absolute and relative tolerance of signal " +
                                std::to_string(k) + " are both zero");
    }
  }
}

AggregationKind parse_aggregation(std::string_view name) {
  if (name == "rmse") return AggregationKind::rmse;
  if (name == "mae") return AggregationKind::mae;
  if (name == "max") return AggregationKind::max;
  throw configuration_error("unknown aggregation '" + std::string(name) +
                            "' (expected rmse, mae or max)");
}

std::string_view to_string(AggregationKind kind) {
  switch (kind) {
    case AggregationKind::rmse: return "rmse";
    case AggregationKind::mae: return "mae";
    case AggregationKind::max: return "max";
  }
  return "?";
}

std::vector<double> normalize(std::span<const double> dy, std::span<const double> y,
                              const ToleranceSet& tol) {
  require_same_length(dy, y, "normalize");
  if (tol.absolute.size() != dy.size() || tol.relative.size() != dy.size()) {
    throw argument_error("normalize: tolerance set has " + std::to_string(tol.size()) +
                         " entries for " + std::to_string(dy.size()) + " signals");
  }
  std::vector<double> eps(dy.size());
  for (std::size_t k = 0; k < dy.size(); ++k) {
    const double denom = tol.absolute[k] + tol.relative[k] * std::abs(y[k]);
    if (!(denom > 0.0)) throw configuration_error("normalize: zero tolerance denominator");
    eps[k] = dy[k] / denom;
  }
  return eps;
}

double aggregate(std::span<const double> eps, AggregationKind kind) {
  if (eps.empty()) throw argument_error("aggregate: empty error vector");
  const auto n = static_cast<double>(eps.size());
  switch (kind) {
    case AggregationKind::rmse: {
      double sq = 0.0;
      for (double e : eps) sq += e * e;
      return std::sqrt(sq / n);
    }
    case AggregationKind::mae: {
      double s = 0.0;
      for (double e : eps) s += std::abs(e);
      return s / n;
    }
    case AggregationKind::max: {
      double m = 0.0;
      for (double e : eps) m = std::max(m, std::abs(e));
      return m;
    }
  }
  throw argument_error("aggregate: unknown kind");
}

ToleranceSet scaled_tolerances(double sigma, std::span<const double> typical_magnitudes) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw configuration_error("relative tolerance must be positive");
  }
  ToleranceSet tol;
  for (double u : typical_magnitudes) {
    if (!(u > 0.0) || !std::isfinite(u)) {
      throw configuration_error("typical magnitudes must be positive");
    }
    tol.absolute.push_back(sigma * u);
    tol.relative.push_back(sigma);
  }
  return tol;
}

}  // namespace cosim
