#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cryptospn/circuit/circuit.hpp"

namespace cryptospn {

using BitVector = std::vector<bool>;

/// Plaintext reference evaluation. Client bits fill the client input groups in
/// declaration order, server bits the server groups. Returns the bits of all
/// output groups, concatenated in declaration order.
BitVector simulate(const Circuit& circuit, const BitVector& client_bits, const BitVector& server_bits);

/// Bit-sliced evaluation of 64 independent assignments: element i of `client`
/// carries lane bits for client input bit i. Returns one lane word per output bit.
std::vector<std::uint64_t> simulate_lanes(const Circuit& circuit, std::span<const std::uint64_t> client,
                                          std::span<const std::uint64_t> server);

void append_bits(BitVector& out, std::uint64_t value, std::size_t width);
std::uint64_t read_bits(const BitVector& bits, std::size_t offset, std::size_t width);

std::uint64_t float_to_bits(double value, FloatFormat fmt);
double bits_to_float(std::uint64_t bits, FloatFormat fmt);

}  // namespace cryptospn
