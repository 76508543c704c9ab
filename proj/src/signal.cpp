#include "cosim/signal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cosim/error.hpp"

namespace cosim {

SignalVector::SignalVector(std::shared_ptr<const SignalLayout> layout)
    : layout_(std::move(layout)), values_(layout_ ? layout_->size() : 0, 0.0) {}

SignalVector::SignalVector(std::shared_ptr<const SignalLayout> layout,
                           std::vector<double> values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  if (layout_ && layout_->size() != values_.size()) {
    throw argument_error("signal vector length " + std::to_string(values_.size()) +
                         " does not match layout length " +
                         std::to_string(layout_->size()));
  }
}

const std::string& SignalVector::label(std::size_t i) const {
  if (!layout_) throw argument_error("signal vector has no layout");
  return layout_->slots.at(i).label;
}

const std::string& SignalVector::unit(std::size_t i) const {
  if (!layout_) throw argument_error("signal vector has no layout");
  return layout_->slots.at(i).unit;
}

bool SignalVector::all_finite() const noexcept { return cosim::all_finite(values_); }

bool all_finite(std::span<const double> values) noexcept {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

void require_same_length(std::span<const double> a, std::span<const double> b,
                         const char* what) {
  if (a.size() != b.size()) {
    throw argument_error(std::string(what) + ": length mismatch (" +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                         ")");
  }
}

}  // namespace cosim
