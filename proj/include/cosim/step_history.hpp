#pragma once

#include <cstddef>
#include <deque>
#include <vector>

namespace cosim {

/// State of the coupled system at one synchronization point.
struct HistoryRecord {
  double t = 0.0;
  /// Length of the macro step starting at `t`; 0 until the next record arrives.
  double dt = 0.0;
  std::vector<double> u;
  std::vector<double> y;
  double eps = 0.0;
};

/// Bounded window over the most recent synchronization points, oldest first.
class StepHistory {
public:
  explicit StepHistory(std::size_t capacity);

  /// Capacity for predictor orders up to `max_order`: max_order + 2 records.
  [[nodiscard]] static StepHistory for_predictor_order(int max_order);

  /// Appends a record. Throws argument_error unless `rec.t` is strictly
  /// greater than the latest time. Fills in the previous record's dt.
  void push(HistoryRecord rec);

  [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
  [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
  [[nodiscard]] bool empty() const noexcept { return records_.empty(); }

  /// i = 0 is the oldest retained record.
  [[nodiscard]] const HistoryRecord& operator[](std::size_t i) const { return records_[i]; }
  /// back(0) is the newest record, back(1) the one before, and so on.
  [[nodiscard]] const HistoryRecord& back(std::size_t k = 0) const;

  void clear() noexcept { records_.clear(); }

private:
  std::size_t capacity_;
  std::deque<HistoryRecord> records_;
};

}  // namespace cosim
