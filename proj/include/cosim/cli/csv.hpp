#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cosim::cli {

/// Shortest decimal form that parses back to the same double, independent of
/// the locale. Non-finite values are written as nan, inf and -inf.
[[nodiscard]] std::string format_number(double value);

/// Parses a number written by format_number. Throws argument_error.
[[nodiscard]] double parse_number(std::string_view text);

class CsvWriter {
public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(std::span<const std::string> columns);
  /// Throws argument_error when the width differs from the header.
  void row(std::span<const double> values);
  /// Writes "# text".
  void comment(std::string_view text);

private:
  std::ostream& out_;
  std::size_t width_ = 0;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> comments;

  /// Index of a column; throws argument_error when absent.
  [[nodiscard]] std::size_t column(std::string_view name) const;
};

/// Reads a file written by CsvWriter. Throws argument_error when a row has
/// the wrong number of fields or a field is not a number.
[[nodiscard]] CsvTable read_csv(std::istream& in);

}  // namespace cosim::cli
