#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cosim {

/// One edge of the connection graph: input `input` is driven by `sign * y[output]`.
struct Connection {
  std::size_t output = 0;
  std::size_t input = 0;
  int sign = +1;
};

/// Sparse signed mapping from outputs to inputs, u = L y.
///
/// An output may drive any number of inputs; every input has exactly one
/// driver. Entries of L are restricted to +1 and -1.
struct ConnectionGraph {
  std::vector<Connection> entries;
  std::size_t n_inputs = 0;
  std::size_t n_outputs = 0;

  /// Index of the output driving each input, or n_outputs if undriven.
  [[nodiscard]] std::vector<std::size_t> driver_of_inputs() const;
};

/// Checks every graph invariant against the given dimensions and returns all
/// violations found (empty when the graph is valid).
[[nodiscard]] std::vector<std::string> validate_graph(const ConnectionGraph& graph,
                                                      std::size_t n_in,
                                                      std::size_t n_out);

/// Computes u = L y. Throws configuration_error for an invalid graph and
/// argument_error when `y` does not have n_outputs entries.
[[nodiscard]] std::vector<double> apply_connections(const ConnectionGraph& graph,
                                                    std::span<const double> y);

/// Dense n_inputs x n_outputs representation of L, row-major.
[[nodiscard]] std::vector<double> dense_matrix(const ConnectionGraph& graph);

}  // namespace cosim
