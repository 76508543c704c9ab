#include "cosim/power_bond.hpp"

#include <map>
#include <utility>

namespace cosim {

std::vector<std::string> validate_bond(const PowerBond& bond, const ConnectionGraph& graph,
                                       const SignalOwnership& owners) {
  std::vector<std::string> problems;
  const std::string name = bond.label.empty() ? std::string("bond") : "bond '" + bond.label + "'";
  if (bond.ports.empty()) {
    problems.push_back(name + " has no ports");
    return problems;
  }

  std::vector<std::size_t> seen_subsystems;
  bool indices_ok = true;
  for (const auto& port : bond.ports) {
    if (port.output >= owners.output_owner.size() || port.input >= owners.input_owner.size()) {
      problems.push_back(name + ": port index out of range");
      indices_ok = false;
      continue;
    }
    if (port.orientation != 1 && port.orientation != -1) {
      problems.push_back(name + ": orientation must be +1 or -1");
    }
    const auto so = owners.output_owner[port.output];
    const auto si = owners.input_owner[port.input];
    if (so != si) {
      problems.push_back(name + ": output " + std::to_string(port.output) + " and input " +
                         std::to_string(port.input) + " belong to different subsystems");
      continue;
    }
    for (auto s : seen_subsystems) {
      if (s == so) {
        problems.push_back(name + ": two ports on subsystem " + std::to_string(so));
      }
    }
    seen_subsystems.push_back(so);
  }
  if (!indices_ok) return problems;

  // sum_k o_k y[out_k] (L y)[in_k] is a quadratic form in y; it vanishes for
  // every y iff its coefficient matrix is antisymmetric.
  const auto driver = graph.driver_of_inputs();
  std::map<std::pair<std::size_t, std::size_t>, int> coeff;
  for (const auto& port : bond.ports) {
    if (port.input >= driver.size() || driver[port.input] >= graph.n_outputs) {
      problems.push_back(name + ": input " + std::to_string(port.input) + " is not driven");
      return problems;
    }
    int sign = 1;
    for (const auto& c : graph.entries) {
      if (c.input == port.input) sign = c.sign;
    }
    coeff[{port.output, driver[port.input]}] += port.orientation * sign;
  }
  for (const auto& [key, value] : coeff) {
    const auto [a, b] = key;
    const auto mirror = coeff.find({b, a});
    const int sym = value + (mirror == coeff.end() ? 0 : mirror->second);
    if ((a == b && value != 0) || (a != b && sym != 0)) {
      problems.push_back(name + ": orientations do not cancel under exact coupling");
      break;
    }
  }
  return problems;
}

}  // namespace cosim
