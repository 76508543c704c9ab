#include "cosim/connection_graph.hpp"

#include <sstream>

#include "cosim/error.hpp"

namespace cosim {

std::vector<std::size_t> ConnectionGraph::driver_of_inputs() const {
  std::vector<std::size_t> driver(n_inputs, n_outputs);
  for (const auto& c : entries) {
    if (c.input < n_inputs) driver[c.input] = c.output;
  }
  return driver;
}

std::vector<std::string> validate_graph(const ConnectionGraph& graph, std::size_t n_in,
                                        std::size_t n_out) {
  std::vector<std::string> problems;
  if (graph.n_inputs != n_in) {
    problems.push_back("graph declares " + std::to_string(graph.n_inputs) +
                       " inputs, expected " + std::to_string(n_in));
  }
  if (graph.n_outputs != n_out) {
    problems.push_back("graph declares " + std::to_string(graph.n_outputs) +
                       " outputs, expected " + std::to_string(n_out));
  }

  std::vector<int> drivers(n_in, 0);
  for (const auto& c : graph.entries) {
    if (c.output >= n_out) {
      problems.push_back("output index out of range: " + std::to_string(c.output));
    }
    if (c.input >= n_in) {
      problems.push_back("input index out of range: " + std::to_string(c.input));
      continue;
    }
    if (c.sign != 1 && c.sign != -1) {
      problems.push_back("invalid sign " + std::to_string(c.sign) + " for input " +
                         std::to_string(c.input));
    }
    if (++drivers[c.input] == 2) {
      problems.push_back("duplicate driver for input " + std::to_string(c.input));
    }
  }
  for (std::size_t j = 0; j < n_in; ++j) {
    if (drivers[j] == 0) problems.push_back("input " + std::to_string(j) + " is not driven");
  }
  return problems;
}

namespace {

void require_valid(const ConnectionGraph& graph) {
  const auto problems = validate_graph(graph, graph.n_inputs, graph.n_outputs);
  if (problems.empty()) return;
  std::ostringstream msg;
  msg << "invalid connection graph:";
  for (const auto& p : problems) msg << ' ' << p << ';';
  throw configuration_error(msg.str());
}

}  // namespace

std::vector<double> apply_connections(const ConnectionGraph& graph,
                                      std::span<const double> y) {
  require_valid(graph);
  if (y.size() != graph.n_outputs) {
    throw argument_error("apply_connections: expected " + std::to_string(graph.n_outputs) +
                         " outputs, got " + std::to_string(y.size()));
  }
  std::vector<double> u(graph.n_inputs, 0.0);
  for (const auto& c : graph.entries) {
    u[c.input] = c.sign > 0 ? y[c.output] : -y[c.output];
  }
  return u;
}

std::vector<double> dense_matrix(const ConnectionGraph& graph) {
  std::vector<double> L(graph.n_inputs * graph.n_outputs, 0.0);
  for (const auto& c : graph.entries) {
    if (c.input < graph.n_inputs && c.output < graph.n_outputs) {
      L[c.input * graph.n_outputs + c.output] = c.sign;
    }
  }
  return L;
}

}  // namespace cosim
