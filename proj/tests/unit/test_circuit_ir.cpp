#include <gtest/gtest.h>

#include <sstream>

#include "cryptospn/circuit/builder.hpp"
#include "cryptospn/circuit/serialize.hpp"
#include "cryptospn/circuit/simulate.hpp"
#include "support.hpp"

using namespace cryptospn;
namespace t = cryptospn::testing;

namespace {

Circuit single_and() {
  CircuitBuilder b;
  const Word x = b.add_input("x", Party::Client, 1);
  const Word y = b.add_input("y", Party::Server, 1);
  b.add_output("z", {b.bit_and(x[0], y[0])});
  return std::move(b).finish();
}

Circuit word_ops(std::size_t w) {
  CircuitBuilder b;
  const Word x = b.add_input("x", Party::Client, static_cast<std::uint32_t>(w));
  const Word y = b.add_input("y", Party::Server, static_cast<std::uint32_t>(w));
  Wire no_borrow = 0;
  b.add_output("sum", words::add(b, x, y, b.constant(false)));
  b.add_output("diff", words::sub(b, x, y, &no_borrow));
  b.add_output("ge", {no_borrow});
  b.add_output("lt", {words::less_than(b, x, y)});
  b.add_output("prod", words::multiply(b, x, y));
  b.add_output("mux", words::mux(b, x[0], x, y));
  b.add_output("shr", words::shift_right(b, x, words::slice(y, 0, 4)));
  return std::move(b).finish();
}

void expect_same(const Circuit& a, const Circuit& b) {
  EXPECT_EQ(a.precision, b.precision);
  EXPECT_EQ(a.num_inputs, b.num_inputs);
  EXPECT_EQ(a.kinds, b.kinds);
  EXPECT_EQ(a.lhs, b.lhs);
  EXPECT_EQ(a.rhs, b.rhs);
  ASSERT_EQ(a.input_groups.size(), b.input_groups.size());
  for (std::size_t i = 0; i < a.input_groups.size(); ++i) {
    EXPECT_EQ(a.input_groups[i].name, b.input_groups[i].name);
    EXPECT_EQ(a.input_groups[i].party, b.input_groups[i].party);
    EXPECT_EQ(a.input_groups[i].first, b.input_groups[i].first);
    EXPECT_EQ(a.input_groups[i].width, b.input_groups[i].width);
  }
  ASSERT_EQ(a.outputs.size(), b.outputs.size());
  for (std::size_t i = 0; i < a.outputs.size(); ++i) {
    EXPECT_EQ(a.outputs[i].name, b.outputs[i].name);
    EXPECT_EQ(a.outputs[i].wires, b.outputs[i].wires);
  }
}

}  // namespace

TEST(Simulate, AndTruthTable) {
  const Circuit c = single_and();
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) EXPECT_EQ(simulate(c, {x == 1}, {y == 1}), BitVector{x == 1 && y == 1});
  }
}

TEST(Simulate, LengthMismatchRejected) {
  const Circuit c = single_and();
  EXPECT_THROW(simulate(c, {}, {true}), std::invalid_argument);
  EXPECT_THROW(simulate(c, {true, false}, {true}), std::invalid_argument);
}

TEST(Simulate, WordOpsMatchIntegerArithmetic) {
  const std::size_t w = 12;
  const Circuit c = word_ops(w);
  t::Rng rng(1);
  const std::uint64_t mask = (1u << w) - 1;
  for (int i = 0; i < 300; ++i) {
    const std::uint64_t x = rng() & mask, y = rng() & mask;
    BitVector cb, sb;
    append_bits(cb, x, w);
    append_bits(sb, y, w);
    const BitVector out = simulate(c, cb, sb);
    std::size_t o = 0;
    EXPECT_EQ(read_bits(out, o, w), (x + y) & mask);
    o += w;
    EXPECT_EQ(read_bits(out, o, w), (x - y) & mask);
    o += w;
    EXPECT_EQ(out[o++], x >= y);
    EXPECT_EQ(out[o++], x < y);
    EXPECT_EQ(read_bits(out, o, 2 * w), x * y);
    o += 2 * w;
    EXPECT_EQ(read_bits(out, o, w), (x & 1) ? x : y);
    o += w;
    EXPECT_EQ(read_bits(out, o, w), x >> (y & 15));
  }
}

TEST(Simulate, LanesAgreeWithScalar) {
  const Circuit c = word_ops(10);
  t::Rng rng(2);
  std::vector<std::uint64_t> cl(c.party_input_bits(Party::Client)), sl(c.party_input_bits(Party::Server));
  for (auto& v : cl) v = rng();
  for (auto& v : sl) v = rng();
  const auto lanes = simulate_lanes(c, cl, sl);
  for (int lane = 0; lane < 64; lane += 7) {
    BitVector cb, sb;
    for (auto v : cl) cb.push_back((v >> lane) & 1);
    for (auto v : sl) sb.push_back((v >> lane) & 1);
    const BitVector out = simulate(c, cb, sb);
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], ((lanes[i] >> lane) & 1) != 0);
  }
}

TEST(Builder, ConstantFolding) {
  CircuitBuilder b;
  const Word x = b.add_input("x", Party::Client, 1);
  const Wire one = b.constant(true), zero = b.constant(false);
  EXPECT_EQ(b.bit_and(x[0], one), x[0]);
  EXPECT_EQ(b.bit_and(x[0], zero), zero);
  EXPECT_EQ(b.bit_xor(x[0], zero), x[0]);
  EXPECT_EQ(b.and_count(), 0u);
  // Same-wire operands are not folded.
  b.bit_and(x[0], x[0]);
  EXPECT_EQ(b.and_count(), 1u);
}

TEST(Builder, OpaqueBlocksFolding) {
  CircuitBuilder b;
  const Word x = b.add_input("x", Party::Client, 1);
  const Wire k = b.opaque(b.constant(false));
  bool v = true;
  EXPECT_FALSE(b.constant_value(k, v));
  const std::uint64_t before = b.and_count();
  b.add_output("z", {b.bit_and(x[0], k), b.opaque(b.constant(true))});
  EXPECT_EQ(b.and_count(), before + 1);
  const Circuit c = std::move(b).finish();
  EXPECT_EQ(simulate(c, {true}, {}), (BitVector{false, true}));
  EXPECT_EQ(simulate(c, {false}, {}), (BitVector{false, true}));
}

TEST(Builder, InputsMustPrecedeGates) {
  CircuitBuilder b;
  const Word x = b.add_input("x", Party::Client, 2);
  b.bit_and(x[0], x[1]);
  EXPECT_ANY_THROW(b.add_input("late", Party::Server, 1));
}

TEST(Stats, EmptyPassthrough) {
  CircuitBuilder b;
  const Word x = b.add_input("x", Party::Client, 4);
  b.add_output("z", x);
  const GateStats st = stats(std::move(b).finish());
  EXPECT_EQ(st.and_count, 0u);
  EXPECT_EQ(st.depth, 0u);
  EXPECT_EQ(st.client_input_bits, 4u);
  EXPECT_EQ(st.output_bits, 4u);
}

TEST(Stats, DirectScan) {
  const Circuit c = word_ops(8);
  GateStats want;
  for (auto k : c.kinds) {
    if (k == GateKind::And) ++want.and_count;
    if (k == GateKind::Xor) ++want.xor_count;
    if (k == GateKind::Inv) ++want.inv_count;
    if (k == GateKind::Const) ++want.const_count;
  }
  const GateStats st = stats(c);
  EXPECT_EQ(st.and_count, want.and_count);
  EXPECT_EQ(st.xor_count, want.xor_count);
  EXPECT_EQ(st.inv_count, want.inv_count);
  EXPECT_EQ(st.const_count, want.const_count);
  EXPECT_EQ(st.client_input_bits, 8u);
  EXPECT_EQ(st.server_input_bits, 8u);
  EXPECT_EQ(st.output_bits, c.output_bits());
}

TEST(Stats, FreeGatesNeverCountAsAnd) {
  CircuitBuilder b;
  const Word x = b.add_input("x", Party::Client, 8);
  Word acc = x;
  for (int i = 0; i < 10; ++i) acc = words::bit_not(b, words::xor_bit(b, acc, x[i % 8]));
  b.add_output("z", acc);
  EXPECT_EQ(stats(std::move(b).finish()).and_count, 0u);
}

TEST(Circuit, CheckRejectsForwardReference) {
  Circuit c = single_and();
  c.lhs[0] = static_cast<Wire>(c.num_wires());
  EXPECT_THROW(c.check(), std::invalid_argument);
}

TEST(Serialize, RoundTrip) {
  const Circuit c = word_ops(9);
  std::stringstream ss;
  write_circuit(ss, c);
  const std::string bytes = ss.str();
  EXPECT_EQ(bytes.substr(0, 4), "CSPN");
  const Circuit back = read_circuit(ss);
  expect_same(c, back);
  std::stringstream again;
  write_circuit(again, back);
  EXPECT_EQ(again.str(), bytes);
}

TEST(Serialize, RejectsCorruptInput) {
  std::stringstream ss;
  write_circuit(ss, single_and());
  std::string bytes = ss.str();
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::stringstream a(bad_magic);
  EXPECT_ANY_THROW(read_circuit(a));
  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_ANY_THROW(read_circuit(truncated));
}

TEST(FloatFormat, Layout) {
  EXPECT_EQ(FloatFormat::binary32().exponent_bits(), 8);
  EXPECT_EQ(FloatFormat::binary64().mantissa_bits(), 52);
  EXPECT_THROW(FloatFormat::from_bits(16), std::invalid_argument);
  EXPECT_EQ(float_to_bits(1.0, FloatFormat::binary32()), 0x3F800000u);
  EXPECT_EQ(bits_to_float(0x4000000000000000ULL, FloatFormat::binary64()), 2.0);
}
