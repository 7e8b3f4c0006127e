#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cryptospn/circuit/circuit.hpp"

namespace cryptospn {

/// Incremental circuit construction with constant folding.
///
/// All inputs must be declared before the first gate so that input wires stay
/// below every gate output. Folding only fires on CONST operands; a gate whose
/// two operands are the same wire is emitted as-is, which keeps the AND count
/// of a block independent of how its inputs alias.
class CircuitBuilder {
 public:
  explicit CircuitBuilder(FloatFormat precision = FloatFormat::binary32());

  Word add_input(std::string name, Party party, std::uint32_t width);
  void add_output(std::string name, const Word& bits);

  Wire constant(bool value);
  Wire bit_xor(Wire a, Wire b);
  Wire bit_and(Wire a, Wire b);
  Wire bit_not(Wire a);
  Wire bit_or(Wire a, Wire b);

  /// A wire equal to `w` that later gates cannot fold: constants are re-derived
  /// from an input wire with free gates. Needs at least one input.
  Wire opaque(Wire w);

  /// Returns true and sets `value` when `w` is a CONST gate output.
  bool constant_value(Wire w, bool& value) const;

  std::uint64_t and_count() const { return and_count_; }
  std::size_t num_gates() const { return circuit_.kinds.size(); }
  FloatFormat precision() const { return circuit_.precision; }
  void reserve(std::size_t gates);

  Circuit finish() &&;

 private:
  Wire emit(GateKind kind, Wire a, Wire b);

  Circuit circuit_;
  Wire zero_ = std::numeric_limits<Wire>::max();
  Wire one_ = std::numeric_limits<Wire>::max();
  Wire opaque_zero_ = std::numeric_limits<Wire>::max();
  Wire opaque_one_ = std::numeric_limits<Wire>::max();
  std::uint64_t and_count_ = 0;
};

namespace words {

Word slice(const Word& w, std::size_t offset, std::size_t length);
Word concat(const Word& low, const Word& high);
Word constant(CircuitBuilder& b, std::uint64_t value, std::size_t width);
Word constant_bits(CircuitBuilder& b, const std::vector<bool>& bits);
Word zeros(CircuitBuilder& b, std::size_t width);
/// Bitwise CircuitBuilder::opaque.
Word opaque(CircuitBuilder& b, const Word& x);

Word bit_not(CircuitBuilder& b, const Word& x);
/// x XOR c for every bit of x.
Word xor_bit(CircuitBuilder& b, const Word& x, Wire c);
/// x AND c for every bit of x.
Word and_bit(CircuitBuilder& b, const Word& x, Wire c);

/// Ripple-carry addition, one AND per bit. Operands must have equal width.
Word add(CircuitBuilder& b, const Word& x, const Word& y, Wire carry_in, Wire* carry_out = nullptr);
/// x - y; `no_borrow` receives 1 iff x >= y (unsigned).
Word sub(CircuitBuilder& b, const Word& x, const Word& y, Wire* no_borrow = nullptr);
/// Unsigned x < y.
Wire less_than(CircuitBuilder& b, const Word& x, const Word& y);
/// Adds the single bit `c` to x.
Word increment(CircuitBuilder& b, const Word& x, Wire c, Wire* carry_out = nullptr);
/// Two's complement negation when `c` is set.
Word negate_if(CircuitBuilder& b, const Word& x, Wire c);

/// c ? x : y, one AND per bit.
Word mux(CircuitBuilder& b, Wire c, const Word& x, const Word& y);
/// Swaps x and y in place when c is set, one AND per bit.
void cond_swap(CircuitBuilder& b, Wire c, Word& x, Word& y);

Wire or_reduce(CircuitBuilder& b, std::span<const Wire> bits);
Wire and_reduce(CircuitBuilder& b, std::span<const Wire> bits);

/// Unsigned product of width x.size() + y.size(). Partial products whose
/// column index is below `drop_columns` are never formed (truncated multiplier);
/// the low result bits are then meaningless and the high bits carry an error of
/// at most drop_columns * 2^drop_columns units.
Word multiply(CircuitBuilder& b, const Word& x, const Word& y, std::size_t drop_columns = 0);

/// Logical right shift by a variable amount, OR-ing every shifted-out bit into bit 0.
Word shift_right_sticky(CircuitBuilder& b, const Word& x, const Word& amount);
/// Logical right shift by a variable amount.
Word shift_right(CircuitBuilder& b, const Word& x, const Word& amount);

/// Selects table[index] for a table of constants, each `width` bits wide.
/// Entries past the table end read as zero.
Word lookup(CircuitBuilder& b, const Word& index, const std::vector<std::vector<bool>>& table);

}  // namespace words
}  // namespace cryptospn
