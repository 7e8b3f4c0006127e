#include "cryptospn/circuit/circuit.hpp"

#include <algorithm>

namespace cryptospn {

const char* to_string(GateKind kind) {
  switch (kind) {
    case GateKind::Xor: return "XOR";
    case GateKind::And: return "AND";
    case GateKind::Inv: return "INV";
    case GateKind::Const: return "CONST";
  }
  return "?";
}

const char* to_string(Party party) { return party == Party::Client ? "client" : "server"; }

std::size_t Circuit::party_input_bits(Party party) const {
  std::size_t total = 0;
  for (const auto& g : input_groups) {
    if (g.party == party) total += g.width;
  }
  return total;
}

std::size_t Circuit::output_bits() const {
  std::size_t total = 0;
  for (const auto& o : outputs) total += o.wires.size();
  return total;
}

void Circuit::check() const {
  if (lhs.size() != kinds.size() || rhs.size() != kinds.size()) {
    throw std::invalid_argument("circuit: gate arrays have inconsistent lengths");
  }
  std::uint64_t next = 0;
  for (const auto& g : input_groups) {
    if (g.first != next) throw std::invalid_argument("circuit: input group '" + g.name + "' is not contiguous");
    next += g.width;
  }
  if (next != num_inputs) throw std::invalid_argument("circuit: input groups do not cover all input wires");
  for (std::size_t g = 0; g < kinds.size(); ++g) {
    const std::uint64_t self = num_inputs + g;
    switch (kinds[g]) {
      case GateKind::Const:
        if (lhs[g] > 1) throw std::invalid_argument("circuit: constant gate with value > 1");
        break;
      case GateKind::Inv:
        if (lhs[g] >= self) throw std::invalid_argument("circuit: gate " + std::to_string(g) + " reads a later wire");
        break;
      case GateKind::Xor:
      case GateKind::And:
        if (lhs[g] >= self || rhs[g] >= self) {
          throw std::invalid_argument("circuit: gate " + std::to_string(g) + " reads a later wire");
        }
        break;
      default:
        throw std::invalid_argument("circuit: unknown gate kind");
    }
  }
  for (const auto& o : outputs) {
    for (Wire w : o.wires) {
      if (w >= num_wires()) throw std::invalid_argument("circuit: output '" + o.name + "' references a missing wire");
    }
  }
}

GateStats stats(const Circuit& circuit) {
  GateStats s;
  std::vector<std::uint32_t> level(circuit.num_wires(), 0);
  for (std::size_t g = 0; g < circuit.num_gates(); ++g) {
    const std::size_t out = circuit.num_inputs + g;
    switch (circuit.kinds[g]) {
      case GateKind::And:
        ++s.and_count;
        level[out] = 1 + std::max(level[circuit.lhs[g]], level[circuit.rhs[g]]);
        break;
      case GateKind::Xor:
        ++s.xor_count;
        level[out] = 1 + std::max(level[circuit.lhs[g]], level[circuit.rhs[g]]);
        break;
      case GateKind::Inv:
        ++s.inv_count;
        level[out] = 1 + level[circuit.lhs[g]];
        break;
      case GateKind::Const:
        ++s.const_count;
        break;
    }
  }
  for (const auto& o : circuit.outputs) {
    for (Wire w : o.wires) s.depth = std::max<std::uint64_t>(s.depth, level[w]);
  }
  s.client_input_bits = circuit.party_input_bits(Party::Client);
  s.server_input_bits = circuit.party_input_bits(Party::Server);
  s.output_bits = circuit.output_bits();
  return s;
}

}  // namespace cryptospn
