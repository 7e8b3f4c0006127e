#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cryptospn {

/// IEEE-754 interchange format used for every arithmetic word in a circuit.
class FloatFormat {
 public:
  constexpr FloatFormat() = default;

  static FloatFormat from_bits(int bits) {
    if (bits != 32 && bits != 64) {
      throw std::invalid_argument("float precision must be 32 or 64 bits, got " + std::to_string(bits));
    }
    return FloatFormat(bits);
  }
  static constexpr FloatFormat binary32() { return FloatFormat(32); }
  static constexpr FloatFormat binary64() { return FloatFormat(64); }

  constexpr int bits() const { return bits_; }
  constexpr int exponent_bits() const { return bits_ == 32 ? 8 : 11; }
  constexpr int mantissa_bits() const { return bits_ == 32 ? 23 : 52; }
  constexpr int bias() const { return bits_ == 32 ? 127 : 1023; }

  friend constexpr bool operator==(FloatFormat, FloatFormat) = default;

 private:
  constexpr explicit FloatFormat(int bits) : bits_(bits) {}
  int bits_ = 32;
};

using Wire = std::uint32_t;
using Word = std::vector<Wire>;  // least significant bit first

enum class GateKind : std::uint8_t { Xor = 0, And = 1, Inv = 2, Const = 3 };
enum class Party : std::uint8_t { Client = 0, Server = 1 };

const char* to_string(GateKind kind);
const char* to_string(Party party);

struct InputGroup {
  std::string name;
  Party party = Party::Client;
  Wire first = 0;
  std::uint32_t width = 0;
};

struct OutputGroup {
  std::string name;
  std::vector<Wire> wires;
};

/// Topologically ordered Boolean circuit.
///
/// Wires `0 .. num_inputs-1` are input bits, laid out by `input_groups` in
/// declaration order. Gate `g` defines wire `num_inputs + g`. For `Const`
/// gates `lhs` holds the constant value and `rhs` is unused; `Inv` uses only
/// `lhs`.
struct Circuit {
  FloatFormat precision;
  std::uint32_t num_inputs = 0;
  std::vector<GateKind> kinds;
  std::vector<Wire> lhs;
  std::vector<Wire> rhs;
  std::vector<InputGroup> input_groups;
  std::vector<OutputGroup> outputs;

  std::size_t num_gates() const { return kinds.size(); }
  std::size_t num_wires() const { return num_inputs + kinds.size(); }
  std::size_t party_input_bits(Party party) const;
  std::size_t output_bits() const;

  /// Throws std::invalid_argument when the structural invariants do not hold.
  void check() const;
};

struct GateStats {
  std::uint64_t and_count = 0;
  std::uint64_t xor_count = 0;
  std::uint64_t inv_count = 0;
  std::uint64_t const_count = 0;
  std::uint64_t depth = 0;
  std::uint64_t client_input_bits = 0;
  std::uint64_t server_input_bits = 0;
  std::uint64_t output_bits = 0;

  friend bool operator==(const GateStats&, const GateStats&) = default;
};

/// Exact scan. `depth` counts gates on the longest input-to-output path.
GateStats stats(const Circuit& circuit);

}  // namespace cryptospn
