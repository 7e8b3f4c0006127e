#pragma once

#include <cstdint>

#include "cryptospn/circuit/builder.hpp"
#include "cryptospn/circuit/circuit.hpp"

namespace cryptospn {

/// Gate-level IEEE-754 arithmetic on words of the builder's precision.
///
/// add and mul are bit-exact with round-to-nearest-even, including subnormal
/// operands and results. exp2 and log2 flush subnormal inputs to zero, use
/// truncating final rounding and stay within 8 ULP of the exact result:
///  - exp2 saturates to +0.0 below the normal range and to +inf at overflow.
///  - log2 returns the canonical quiet NaN for x <= 0 (including -0.0 and
///    flushed subnormals), +inf for +inf.
namespace fp {

Word negate(CircuitBuilder& b, const Word& x);
Word add(CircuitBuilder& b, const Word& x, const Word& y);
Word sub(CircuitBuilder& b, const Word& x, const Word& y);
Word mul(CircuitBuilder& b, const Word& x, const Word& y);
Word exp2(CircuitBuilder& b, const Word& x);
Word log2(CircuitBuilder& b, const Word& x);
/// control ? x : y
Word mux(CircuitBuilder& b, Wire control, const Word& x, const Word& y);

std::uint64_t quiet_nan_bits(FloatFormat fmt);

}  // namespace fp

// Standalone blocks. Operand "x" is a client input, operand "y" a server
// input; the mux control "c" is a client bit. Output group "z".
Circuit build_fp_add(FloatFormat fmt);
Circuit build_fp_mul(FloatFormat fmt);
Circuit build_fp_exp2(FloatFormat fmt);
Circuit build_fp_log2(FloatFormat fmt);
Circuit build_mux(FloatFormat fmt);

/// AND gates of each standalone block, measured by building it once.
struct BlockCosts {
  std::uint64_t add = 0;
  std::uint64_t mul = 0;
  std::uint64_t exp2 = 0;
  std::uint64_t log2 = 0;
  std::uint64_t mux = 0;
};

const BlockCosts& measured_block_costs(FloatFormat fmt);

}  // namespace cryptospn
