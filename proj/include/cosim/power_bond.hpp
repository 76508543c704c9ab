#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cosim/connection_graph.hpp"

namespace cosim {

/// One port of a power bond: the output y_k and the (extrapolated) input u_k
/// of the same subsystem, whose product is the power that subsystem transmits.
struct BondPort {
  std::size_t output = 0;
  std::size_t input = 0;
  int orientation = +1;
};

/// Oriented pairing of input/output signals whose products are physical powers.
///
/// Orientations are chosen so that sum_k orientation_k * y_k * u_k vanishes
/// identically when every input equals its driving output (exact coupling).
struct PowerBond {
  std::vector<BondPort> ports;
  std::string label;
};

/// Ownership of global signal indices by subsystem index.
struct SignalOwnership {
  std::vector<std::size_t> input_owner;
  std::vector<std::size_t> output_owner;
};

/// Returns all violations of the bond invariants: indices in range, each port
/// within one subsystem, ports on distinct subsystems, valid orientations, and
/// exact cancellation of the oriented power under instantaneous coupling.
[[nodiscard]] std::vector<std::string> validate_bond(const PowerBond& bond,
                                                     const ConnectionGraph& graph,
                                                     const SignalOwnership& owners);

}  // namespace cosim
