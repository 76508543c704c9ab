#include "cosim/step_history.hpp"

#include <string>

#include "cosim/error.hpp"

namespace cosim {

StepHistory::StepHistory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw configuration_error("step history capacity must be positive");
}

StepHistory StepHistory::for_predictor_order(int max_order) {
  if (max_order < 0) throw configuration_error("predictor order must be non-negative");
  return StepHistory(static_cast<std::size_t>(max_order) + 2);
}

void StepHistory::push(HistoryRecord rec) {
  if (!records_.empty()) {
    auto& last = records_.back();
    if (!(rec.t > last.t)) {
      throw argument_error("step history times must be strictly increasing (" +
                           std::to_string(rec.t) + " after " + std::to_string(last.t) + ")");
    }
    last.dt = rec.t - last.t;
  }
  records_.push_back(std::move(rec));
  while (records_.size() > capacity_) records_.pop_front();
}

const HistoryRecord& StepHistory::back(std::size_t k) const {
  if (k >= records_.size()) throw argument_error("step history: not enough records");
  return records_[records_.size() - 1 - k];
}

}  // namespace cosim
