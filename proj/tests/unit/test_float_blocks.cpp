#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <limits>

#include "cryptospn/circuit/float_blocks.hpp"
#include "cryptospn/circuit/simulate.hpp"
#include "support.hpp"

using namespace cryptospn;
namespace t = cryptospn::testing;

namespace {

constexpr int kSamples = 10000;

const FloatFormat kFormats[] = {FloatFormat::binary32(), FloatFormat::binary64()};

std::uint64_t mask_of(FloatFormat f) { return f.bits() == 64 ? ~0ULL : (1ULL << f.bits()) - 1; }

// Finite operand: a random bit pattern with a non-maximal exponent, or a value of modest magnitude.
std::uint64_t random_finite(t::Rng& rng, FloatFormat f) {
  if (rng() % 2 == 0) {
    const double v = std::uniform_real_distribution<double>(-1000.0, 1000.0)(rng);
    return float_to_bits(v, f);
  }
  for (;;) {
    const std::uint64_t bits = rng() & mask_of(f);
    const std::uint64_t exp = (bits >> f.mantissa_bits()) & ((1ULL << f.exponent_bits()) - 1);
    if (exp != (1ULL << f.exponent_bits()) - 1) return bits;
  }
}

// Host IEEE-754 reference for add and mul.
std::uint64_t native(FloatFormat f, std::uint64_t a, std::uint64_t b, bool mul) {
  if (f.bits() == 32) {
    const float x = std::bit_cast<float>(static_cast<std::uint32_t>(a));
    const float y = std::bit_cast<float>(static_cast<std::uint32_t>(b));
    return std::bit_cast<std::uint32_t>(mul ? x * y : x + y);
  }
  const double x = std::bit_cast<double>(a), y = std::bit_cast<double>(b);
  return std::bit_cast<std::uint64_t>(mul ? x * y : x + y);
}

std::uint64_t round_to(FloatFormat f, long double v) {
  if (f.bits() == 32) return std::bit_cast<std::uint32_t>(static_cast<float>(v));
  return std::bit_cast<std::uint64_t>(static_cast<double>(v));
}

long double as_long_double(FloatFormat f, std::uint64_t bits) { return static_cast<long double>(bits_to_float(bits, f)); }

std::vector<std::uint64_t> run_unary(const Circuit& c, const std::vector<std::uint64_t>& xs) {
  const auto w = static_cast<std::size_t>(c.precision.bits());
  std::vector<BitVector> client, server(xs.size());
  for (auto x : xs) {
    BitVector b;
    append_bits(b, x, w);
    client.push_back(std::move(b));
  }
  std::vector<std::uint64_t> out;
  for (const auto& r : t::simulate_batch(c, client, server)) out.push_back(read_bits(r, 0, w));
  return out;
}

std::vector<std::uint64_t> run_binary(const Circuit& c, const std::vector<std::uint64_t>& xs,
                                      const std::vector<std::uint64_t>& ys) {
  const auto w = static_cast<std::size_t>(c.precision.bits());
  std::vector<BitVector> client, server;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    BitVector a, b;
    append_bits(a, xs[i], w);
    append_bits(b, ys[i], w);
    client.push_back(std::move(a));
    server.push_back(std::move(b));
  }
  std::vector<std::uint64_t> out;
  for (const auto& r : t::simulate_batch(c, client, server)) out.push_back(read_bits(r, 0, w));
  return out;
}

std::uint64_t one_unary(const Circuit& c, double x) { return run_unary(c, {float_to_bits(x, c.precision)})[0]; }

std::uint64_t one_binary(const Circuit& c, double x, double y) {
  return run_binary(c, {float_to_bits(x, c.precision)}, {float_to_bits(y, c.precision)})[0];
}

void check_binary_exact(FloatFormat f, bool mul) {
  const Circuit c = mul ? build_fp_mul(f) : build_fp_add(f);
  t::Rng rng(mul ? 11 : 10);
  std::vector<std::uint64_t> xs, ys;
  for (int i = 0; i < kSamples; ++i) {
    xs.push_back(random_finite(rng, f));
    // Every fourth pair shares the exponent to exercise cancellation.
    ys.push_back(i % 4 == 0 ? (xs.back() ^ (rng() & ((1ULL << f.mantissa_bits()) - 1)) ^ (1ULL << (f.bits() - 1)))
                            : random_finite(rng, f));
  }
  const auto got = run_binary(c, xs, ys);
  int bad = 0;
  for (int i = 0; i < kSamples; ++i) {
    if (got[i] != native(f, xs[i], ys[i], mul) && ++bad < 5) {
      ADD_FAILURE() << "b" << f.bits() << (mul ? " mul " : " add ") << std::hex << xs[i] << " " << ys[i] << " -> "
                    << got[i] << " want " << native(f, xs[i], ys[i], mul);
    }
  }
  EXPECT_EQ(bad, 0);
}

}  // namespace

TEST(FpAdd, SmallExamples) {
  for (auto f : kFormats) {
    const Circuit c = build_fp_add(f);
    EXPECT_EQ(one_binary(c, 1.0, 2.0), float_to_bits(3.0, f));
    for (double x : {1.5, -7.25, 1e-3, 123456.0}) EXPECT_EQ(one_binary(c, x, 0.0), float_to_bits(x, f));
    EXPECT_EQ(one_binary(c, -0.0, 0.0), float_to_bits(0.0, f));
    EXPECT_EQ(one_binary(c, -0.0, -0.0), float_to_bits(-0.0, f));
  }
}

TEST(FpAdd, MatchesNative) {
  for (auto f : kFormats) check_binary_exact(f, false);
}

TEST(FpMul, SmallExamples) {
  for (auto f : kFormats) {
    const Circuit c = build_fp_mul(f);
    EXPECT_EQ(one_binary(c, 0.5, 0.5), float_to_bits(0.25, f));
    for (double x : {1.5, -7.25, 1e-3, 123456.0}) EXPECT_EQ(one_binary(c, x, 1.0), float_to_bits(x, f));
  }
}

TEST(FpMul, MatchesNative) {
  for (auto f : kFormats) check_binary_exact(f, true);
}

TEST(FpExp2, Examples) {
  for (auto f : kFormats) {
    const Circuit c = build_fp_exp2(f);
    EXPECT_EQ(one_unary(c, 3.0), float_to_bits(8.0, f));
    EXPECT_EQ(one_unary(c, 0.0), float_to_bits(1.0, f));
    EXPECT_EQ(one_unary(c, -5.0), float_to_bits(0.03125, f));
    EXPECT_EQ(one_unary(c, -2000.0), float_to_bits(0.0, f));
    EXPECT_EQ(one_unary(c, 2000.0), float_to_bits(std::numeric_limits<double>::infinity(), f));
  }
}

TEST(FpExp2, WithinEightUlp) {
  for (auto f : kFormats) {
    const Circuit c = build_fp_exp2(f);
    t::Rng rng(20);
    const double hi = f.bits() == 32 ? 127.0 : 1023.0;
    std::vector<std::uint64_t> xs;
    for (int i = 0; i < kSamples; ++i) {
      const double lo = i < 1000 ? -40.0 : -(hi - 1.0);
      const double top = i < 1000 ? 40.0 : hi;
      xs.push_back(float_to_bits(std::uniform_real_distribution<double>(lo, top)(rng), f));
    }
    const auto got = run_unary(c, xs);
    std::uint64_t worst = 0;
    for (int i = 0; i < kSamples; ++i) {
      const auto want = round_to(f, std::exp2l(as_long_double(f, xs[i])));
      worst = std::max(worst, t::ulp_distance(got[i], want, f));
    }
    EXPECT_LE(worst, 8u) << "b" << f.bits();
  }
}

TEST(FpLog2, Examples) {
  for (auto f : kFormats) {
    const Circuit c = build_fp_log2(f);
    EXPECT_EQ(one_unary(c, 8.0), float_to_bits(3.0, f));
    EXPECT_EQ(one_unary(c, 1.0), float_to_bits(0.0, f));
    EXPECT_EQ(one_unary(c, 0.125), float_to_bits(-3.0, f));
    const std::uint64_t nan = fp::quiet_nan_bits(f);
    EXPECT_EQ(one_unary(c, 0.0), nan);
    EXPECT_EQ(one_unary(c, -0.0), nan);
    EXPECT_EQ(one_unary(c, -2.0), nan);
    EXPECT_EQ(one_unary(c, std::numeric_limits<double>::infinity()),
              float_to_bits(std::numeric_limits<double>::infinity(), f));
  }
}

TEST(FpLog2, WithinEightUlp) {
  for (auto f : kFormats) {
    const Circuit c = build_fp_log2(f);
    t::Rng rng(21);
    std::vector<std::uint64_t> xs;
    for (int i = 0; i < kSamples; ++i) {
      if (i < 1000) {
        xs.push_back(float_to_bits(std::uniform_real_distribution<double>(1e-9, 1e6)(rng), f));
      } else {
        // Random positive normal pattern.
        const std::uint64_t exp_max = (1ULL << f.exponent_bits()) - 2;
        const std::uint64_t e = 1 + rng() % exp_max;
        const std::uint64_t m = rng() & ((1ULL << f.mantissa_bits()) - 1);
        xs.push_back((e << f.mantissa_bits()) | m);
      }
    }
    const auto got = run_unary(c, xs);
    std::uint64_t worst = 0;
    for (int i = 0; i < kSamples; ++i) {
      const auto want = round_to(f, std::log2l(as_long_double(f, xs[i])));
      worst = std::max(worst, t::ulp_distance(got[i], want, f));
    }
    EXPECT_LE(worst, 8u) << "b" << f.bits();
  }
}

TEST(Mux, SelectsAndCostsOneAndPerBit) {
  for (auto f : kFormats) {
    const Circuit c = build_mux(f);
    EXPECT_EQ(stats(c).and_count, static_cast<std::uint64_t>(f.bits()));
    const auto w = static_cast<std::size_t>(f.bits());
    for (bool ctl : {false, true}) {
      BitVector client{ctl}, server;
      append_bits(client, float_to_bits(1.5, f), w);
      append_bits(server, float_to_bits(-4.0, f), w);
      EXPECT_EQ(read_bits(simulate(c, client, server), 0, w), float_to_bits(ctl ? 1.5 : -4.0, f));
      BitVector same{ctl};
      append_bits(same, float_to_bits(2.5, f), w);
      BitVector same_s;
      append_bits(same_s, float_to_bits(2.5, f), w);
      EXPECT_EQ(read_bits(simulate(c, same, same_s), 0, w), float_to_bits(2.5, f));
    }
  }
  EXPECT_EQ(stats(build_mux(FloatFormat::binary32())).and_count, 32u);
}

TEST(BlockCosts, MeasuredConstantsMatchBlocks) {
  for (auto f : kFormats) {
    const BlockCosts& k = measured_block_costs(f);
    EXPECT_EQ(k.add, stats(build_fp_add(f)).and_count);
    EXPECT_EQ(k.mul, stats(build_fp_mul(f)).and_count);
    EXPECT_EQ(k.exp2, stats(build_fp_exp2(f)).and_count);
    EXPECT_EQ(k.log2, stats(build_fp_log2(f)).and_count);
    EXPECT_EQ(k.mux, stats(build_mux(f)).and_count);
  }
  // Frozen counts of this construction.
  const BlockCosts& b32 = measured_block_costs(FloatFormat::binary32());
  EXPECT_EQ(b32.add, 801u);
  EXPECT_EQ(b32.mul, 2278u);
  EXPECT_EQ(b32.exp2, 2755u);
  EXPECT_EQ(b32.log2, 4522u);
  const BlockCosts& b64 = measured_block_costs(FloatFormat::binary64());
  EXPECT_EQ(b64.add, 1703u);
  EXPECT_EQ(b64.mul, 8138u);
  EXPECT_EQ(b64.exp2, 15672u);
  EXPECT_EQ(b64.log2, 22318u);
}

TEST(BlockCosts, CompositionIsAdditive) {
  for (auto f : kFormats) {
    CircuitBuilder b(f);
    const Word x = b.add_input("x", Party::Client, static_cast<std::uint32_t>(f.bits()));
    const Word y = b.add_input("y", Party::Server, static_cast<std::uint32_t>(f.bits()));
    const Wire c = b.add_input("c", Party::Client, 1)[0];
    const Word s = fp::add(b, x, y);
    const Word p = fp::mul(b, s, y);
    const Word l = fp::log2(b, p);
    const Word e = fp::exp2(b, l);
    b.add_output("z", fp::mux(b, c, e, x));
    const BlockCosts& k = measured_block_costs(f);
    EXPECT_EQ(stats(std::move(b).finish()).and_count, k.add + k.mul + k.log2 + k.exp2 + k.mux);
  }
}
