#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cryptospn/circuit/circuit.hpp"
#include "cryptospn/circuit/simulate.hpp"
#include "cryptospn/gc/aes.hpp"

namespace cryptospn {

inline constexpr std::size_t kLabelBytes = 16;
inline constexpr std::size_t kAndGateBytes = 2 * kLabelBytes;

/// Input wire indices of one party, in input-group declaration order.
std::vector<Wire> party_input_wires(const Circuit& circuit, Party party);

/// Half-gates garbler with free XOR. Label semantics: a wire's 1-label is its
/// 0-label XOR Δ, and Δ has its point bit set. INV and XOR gates are free;
/// CONST wires use the public label 0 for their value.
class Garbler {
 public:
  using Sink = std::function<void(const std::uint8_t*, std::size_t)>;

  Garbler(const Circuit& circuit, AesPrg& prg);

  Block delta() const { return delta_; }
  Block zero_label(Wire input) const { return labels_[input]; }
  Block label(Wire input, bool value) const { return value ? _mm_xor_si128(labels_[input], delta_) : labels_[input]; }

  /// Garbles every gate in order and streams the AND ciphertext pairs to
  /// `sink` in chunks of at most `chunk_bytes`.
  void garble(const Sink& sink, std::size_t chunk_bytes = std::size_t{1} << 20);
  /// Point bits of the output wires' 0-labels; valid after garble().
  const BitVector& decode_table() const { return decode_; }

 private:
  const Circuit& circuit_;
  Block delta_;
  std::vector<Block> labels_;
  BitVector decode_;
};

struct GarbledCircuit {
  std::vector<std::uint8_t> tables;
  BitVector decode;
};

/// One-shot garbling with a seeded PRG; for tests and tooling.
struct GarbleResult {
  GarbledCircuit gc;
  Block delta;
  std::vector<Block> input_zero_labels;

  /// Labels for a full input assignment, laid out like simulate()'s inputs.
  std::vector<Block> encode(const Circuit& circuit, const BitVector& client_bits, const BitVector& server_bits) const;
};

GarbleResult garble(const Circuit& circuit, std::uint64_t seed);

/// Evaluates a garbled circuit from one label per input wire. Throws
/// ProtocolError when the table stream does not hold 32 bytes per AND gate.
std::vector<Block> evaluate_garbled(const Circuit& circuit, std::span<const std::uint8_t> tables,
                                    const std::vector<Block>& input_labels);

BitVector decode_labels(const std::vector<Block>& output_labels, const BitVector& decode);

}  // namespace cryptospn
