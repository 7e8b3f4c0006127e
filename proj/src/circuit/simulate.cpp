#include "cryptospn/circuit/simulate.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace cryptospn {
namespace {

template <typename Lane>
std::vector<Lane> run(const Circuit& c, std::span<const Lane> client, std::span<const Lane> server) {
  if (client.size() != c.party_input_bits(Party::Client)) {
    throw std::invalid_argument("simulate: expected " + std::to_string(c.party_input_bits(Party::Client)) +
                                " client bits, got " + std::to_string(client.size()));
  }
  if (server.size() != c.party_input_bits(Party::Server)) {
    throw std::invalid_argument("simulate: expected " + std::to_string(c.party_input_bits(Party::Server)) +
                                " server bits, got " + std::to_string(server.size()));
  }
  std::vector<Lane> value(c.num_wires());
  std::size_t ci = 0, si = 0;
  for (const auto& g : c.input_groups) {
    for (std::uint32_t i = 0; i < g.width; ++i) {
      value[g.first + i] = g.party == Party::Client ? client[ci++] : server[si++];
    }
  }
  const Lane ones = static_cast<Lane>(~Lane{0});
  for (std::size_t g = 0; g < c.num_gates(); ++g) {
    Lane& out = value[c.num_inputs + g];
    switch (c.kinds[g]) {
      case GateKind::Xor: out = value[c.lhs[g]] ^ value[c.rhs[g]]; break;
      case GateKind::And: out = value[c.lhs[g]] & value[c.rhs[g]]; break;
      case GateKind::Inv: out = value[c.lhs[g]] ^ ones; break;
      case GateKind::Const: out = c.lhs[g] ? ones : Lane{0}; break;
    }
  }
  std::vector<Lane> result;
  result.reserve(c.output_bits());
  for (const auto& o : c.outputs) {
    for (Wire w : o.wires) result.push_back(value[w]);
  }
  return result;
}

}  // namespace

BitVector simulate(const Circuit& circuit, const BitVector& client_bits, const BitVector& server_bits) {
  std::vector<std::uint8_t> client(client_bits.begin(), client_bits.end());
  std::vector<std::uint8_t> server(server_bits.begin(), server_bits.end());
  const auto lanes = run<std::uint8_t>(circuit, client, server);
  BitVector out(lanes.size());
  for (std::size_t i = 0; i < lanes.size(); ++i) out[i] = (lanes[i] & 1U) != 0;
  return out;
}

std::vector<std::uint64_t> simulate_lanes(const Circuit& circuit, std::span<const std::uint64_t> client,
                                          std::span<const std::uint64_t> server) {
  return run<std::uint64_t>(circuit, client, server);
}

void append_bits(BitVector& out, std::uint64_t value, std::size_t width) {
  for (std::size_t i = 0; i < width; ++i) out.push_back(i < 64 && ((value >> i) & 1U));
}

std::uint64_t read_bits(const BitVector& bits, std::size_t offset, std::size_t width) {
  if (width > 64 || offset + width > bits.size()) throw std::out_of_range("read_bits out of range");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bits[offset + i]) << i;
  return v;
}

std::uint64_t float_to_bits(double value, FloatFormat fmt) {
  if (fmt.bits() == 32) return std::bit_cast<std::uint32_t>(static_cast<float>(value));
  return std::bit_cast<std::uint64_t>(value);
}

double bits_to_float(std::uint64_t bits, FloatFormat fmt) {
  if (fmt.bits() == 32) return std::bit_cast<float>(static_cast<std::uint32_t>(bits));
  return std::bit_cast<double>(bits);
}

}  // namespace cryptospn
