#include "cryptospn/circuit/float_blocks.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <mutex>
#include <stdexcept>

namespace cryptospn {
namespace {

using Big = boost::multiprecision::cpp_bin_float_100;
using BigInt = boost::multiprecision::cpp_int;
using namespace words;

struct Parts {
  Wire sign;
  Word exp;
  Word mant;
};

Parts unpack(CircuitBuilder& b, const Word& x) {
  const FloatFormat f = b.precision();
  if (x.size() != static_cast<std::size_t>(f.bits())) throw std::invalid_argument("float word has wrong width");
  const auto m = static_cast<std::size_t>(f.mantissa_bits());
  const auto e = static_cast<std::size_t>(f.exponent_bits());
  return Parts{x[f.bits() - 1], slice(x, m, e), slice(x, 0, m)};
}

Word pack(const Parts& p) {
  Word out = concat(p.mant, p.exp);
  out.push_back(p.sign);
  return out;
}

Wire is_zero(CircuitBuilder& b, const Word& x) { return b.bit_not(or_reduce(b, x)); }

Word or_bit(CircuitBuilder& b, const Word& x, Wire c) {
  Word out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = b.bit_or(x[i], c);
  return out;
}

Word zero_extend(CircuitBuilder& b, Word x, std::size_t width) {
  while (x.size() < width) x.push_back(b.constant(false));
  x.resize(width);
  return x;
}

// Overrides a finite result with the special encodings. Canonical NaN has a
// positive sign, all-ones exponent and only the top mantissa bit set.
Word apply_specials(CircuitBuilder& b, Parts r, Wire special, Wire nan) {
  const Wire keep = b.bit_not(special);
  r.sign = b.bit_and(r.sign, b.bit_not(nan));
  r.exp = or_bit(b, r.exp, special);
  r.mant = and_bit(b, r.mant, keep);
  r.mant.back() = b.bit_or(r.mant.back(), nan);
  return pack(r);
}

// Left shift by up to `allowance` (when non-null) positions, greedily by
// powers of two, until the top bit is set. `allowance` is decremented by the
// shift taken; `shift` receives the shift as a binary number.
Word normalize_left(CircuitBuilder& b, Word x, Word* allowance, Word* shift, std::size_t keep_top) {
  const std::size_t n = x.size();
  std::size_t s_max = 0;
  while ((std::size_t{2} << s_max) <= n - 1) ++s_max;
  if (shift) shift->assign(s_max + 1, b.constant(false));
  for (std::size_t si = s_max + 1; si-- > 0;) {
    const std::size_t k = std::size_t{1} << si;
    if (k >= n) continue;
    Wire go = is_zero(b, slice(x, n - k, k));
    if (allowance) {
      Word& a = *allowance;
      const Wire enough = si < a.size() ? or_reduce(b, slice(a, si, a.size() - si)) : b.constant(false);
      go = b.bit_and(go, enough);
      // a -= go << si
      Word hi = slice(a, si, a.size() - si);
      Wire borrow = go;
      for (auto& w : hi) {
        const Wire nw = b.bit_xor(w, borrow);
        borrow = b.bit_and(borrow, b.bit_not(w));
        w = nw;
      }
      std::copy(hi.begin(), hi.end(), a.begin() + static_cast<std::ptrdiff_t>(si));
    }
    if (shift) (*shift)[si] = go;
    // Bits that cannot reach the kept top region after the remaining stages.
    const std::size_t low = keep_top + k - 1 < n ? n - keep_top - (k - 1) : 0;
    Word shifted(n, b.constant(false));
    for (std::size_t i = k; i < n; ++i) shifted[i] = x[i - k];
    Word next(n, b.constant(false));
    for (std::size_t i = low; i < n; ++i) next[i] = b.bit_xor(x[i], b.bit_and(go, b.bit_xor(shifted[i], x[i])));
    x = std::move(next);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Fixed point helpers: `bits` is an unsigned integer scaled by 2^-frac.

struct Fixed {
  Word bits;
  int frac;
};

// Re-expresses x with `frac` fraction bits (truncating) and a value bound of
// 2^int_bits.
Fixed reshape(CircuitBuilder& b, const Fixed& x, int frac, int int_bits) {
  const int width = std::max(frac + int_bits, 1);
  Word out(static_cast<std::size_t>(width));
  for (int i = 0; i < width; ++i) {
    const int src = i + x.frac - frac;
    out[static_cast<std::size_t>(i)] =
        src >= 0 && src < static_cast<int>(x.bits.size()) ? x.bits[static_cast<std::size_t>(src)] : b.constant(false);
  }
  return Fixed{std::move(out), frac};
}

int ceil_log2(std::size_t v) {
  int r = 0;
  while ((std::size_t{1} << r) < v) ++r;
  return r;
}

Fixed mul_fixed(CircuitBuilder& b, const Fixed& x, const Fixed& y, int frac, int int_bits) {
  const int pf = x.frac + y.frac;
  const int guard = ceil_log2(std::min(x.bits.size(), y.bits.size())) + 2;
  const int drop = std::max(pf - frac - guard, 0);
  Word p = multiply(b, x.bits, y.bits, static_cast<std::size_t>(drop));
  return reshape(b, Fixed{std::move(p), pf}, frac, int_bits);
}

std::vector<bool> fixed_constant(const Big& v, int frac, int width) {
  const Big scaled = boost::multiprecision::ldexp(v, frac);
  const BigInt n = static_cast<BigInt>(boost::multiprecision::round(scaled));
  std::vector<bool> bits(static_cast<std::size_t>(width));
  for (int i = 0; i < width; ++i) bits[static_cast<std::size_t>(i)] = boost::multiprecision::bit_test(n, static_cast<unsigned>(i));
  return bits;
}

Fixed const_fixed(CircuitBuilder& b, const Big& v, int frac, int int_bits) {
  return Fixed{constant_bits(b, fixed_constant(v, frac, frac + int_bits)), frac};
}

Big big_ln2() { return boost::multiprecision::log(Big(2)); }

struct Exp2Params {
  int int_bits;   // saturation threshold 2^int_bits
  int frac_bits;  // fixed-point fraction bits of the argument
  int precision;  // absolute precision target of 2^f is 2^-precision
  int table_bits;
  int degree;
};

struct Log2Params {
  int table_bits;
  int recip_bits;  // fraction bits of the reciprocal table
  int degree;
  int precision;   // relative precision target of the series factor
  int table_frac;  // fraction bits of the log table
};

Exp2Params exp2_params(FloatFormat f) {
  if (f.bits() == 32) return Exp2Params{7, 26, 25, 5, 3};
  return Exp2Params{10, 55, 54, 6, 6};
}

Log2Params log2_params(FloatFormat f) {
  if (f.bits() == 32) return Log2Params{5, 8, 3, 26, 31};
  return Log2Params{6, 9, 7, 55, 61};
}

// 2^f for f in [0, 1) with `fb` fraction bits. Returns a value with
// precision+2 fraction bits and two integer bits.
Fixed exp2_unit(CircuitBuilder& b, const Word& f, int fb, const Exp2Params& p) {
  const int k = p.table_bits;
  const int pr = p.precision + 2;
  const Word idx = slice(f, static_cast<std::size_t>(fb - k), static_cast<std::size_t>(k));
  const Fixed y{slice(f, 0, static_cast<std::size_t>(fb - k)), fb};

  std::vector<std::vector<bool>> table;
  for (int i = 0; i < (1 << k); ++i) {
    table.push_back(fixed_constant(boost::multiprecision::pow(Big(2), Big(i) / Big(1 << k)), pr, pr + 1));
  }
  const Fixed t{lookup(b, idx, table), pr};

  std::vector<Big> coef(static_cast<std::size_t>(p.degree + 1));
  Big term = 1;
  for (int j = 1; j <= p.degree; ++j) {
    term = term * big_ln2() / Big(j);
    coef[static_cast<std::size_t>(j)] = term;
  }
  const auto prec_at = [&](int j) { return std::max(pr - k * j, k + 1); };
  Fixed acc = const_fixed(b, coef[static_cast<std::size_t>(p.degree)], prec_at(p.degree - 1), 0);
  for (int j = p.degree - 1; j >= 1; --j) {
    const int tj = prec_at(j);
    const Fixed prod = mul_fixed(b, reshape(b, y, tj, -k), reshape(b, acc, tj, 0), tj, 0);
    const Fixed c = const_fixed(b, coef[static_cast<std::size_t>(j)], tj, 0);
    acc = Fixed{add(b, c.bits, prod.bits, b.constant(false)), tj};
  }
  const Fixed q = mul_fixed(b, reshape(b, y, pr, -k), reshape(b, acc, pr, 0), pr, 1 - k);
  const Fixed tq = mul_fixed(b, t, q, pr, 2 - k);
  const Word lhs = reshape(b, t, pr, 2).bits;
  const Word rhs = reshape(b, tq, pr, 2).bits;
  return Fixed{add(b, lhs, rhs, b.constant(false)), pr};
}

}  // namespace

namespace fp {

std::uint64_t quiet_nan_bits(FloatFormat fmt) {
  const auto m = fmt.mantissa_bits();
  const auto e = fmt.exponent_bits();
  return (((std::uint64_t{1} << e) - 1) << m) | (std::uint64_t{1} << (m - 1));
}

Word negate(CircuitBuilder& b, const Word& x) {
  Word out = x;
  out.back() = b.bit_not(x.back());
  return out;
}

Word mux(CircuitBuilder& b, Wire control, const Word& x, const Word& y) { return words::mux(b, control, x, y); }

Word add(CircuitBuilder& b, const Word& x_in, const Word& y_in) {
  const FloatFormat f = b.precision();
  const auto M = static_cast<std::size_t>(f.mantissa_bits());
  const auto E = static_cast<std::size_t>(f.exponent_bits());
  Word x = x_in, y = y_in;
  if (x.size() != static_cast<std::size_t>(f.bits()) || y.size() != static_cast<std::size_t>(f.bits())) throw std::invalid_argument("fp::add width mismatch");

  // Order by magnitude so that |a| >= |c|.
  const Wire swap = less_than(b, slice(x, 0, M + E), slice(y, 0, M + E));
  cond_swap(b, swap, x, y);
  const Parts a = unpack(b, x), c = unpack(b, y);

  const Wire ha = or_reduce(b, a.exp), hc = or_reduce(b, c.exp);
  Word ea = a.exp, ec = c.exp;
  ea[0] = b.bit_xor(ea[0], b.bit_not(ha));
  ec[0] = b.bit_xor(ec[0], b.bit_not(hc));
  const Word d = words::sub(b, ea, ec);

  // Mantissas with three low guard positions and one overflow position.
  Word xm = zeros(b, 3), ym = zeros(b, 3);
  xm = concat(xm, a.mant);
  xm.push_back(ha);
  ym = concat(ym, c.mant);
  ym.push_back(hc);
  ym = shift_right_sticky(b, ym, d);
  const Wire op = b.bit_xor(a.sign, c.sign);
  xm.push_back(b.constant(false));
  ym.push_back(b.constant(false));
  const Word s = words::add(b, xm, xor_bit(b, ym, op), op);
  const Wire ov = s[M + 4];

  Word shifted(M + 4);
  shifted[0] = b.bit_or(s[0], s[1]);
  for (std::size_t i = 1; i < M + 4; ++i) shifted[i] = s[i + 1];
  Word n = words::mux(b, ov, shifted, slice(s, 0, M + 4));
  const Wire exact_zero = is_zero(b, n);

  Word allowance = words::add(b, ea, constant(b, ~std::uint64_t{0}, E), ov);
  n = normalize_left(b, n, &allowance, nullptr, M + 4);
  const Wire top = n[M + 3];
  const Word exp_pre = increment(b, and_bit(b, allowance, top), top);

  const Wire g = n[2];
  const Wire round_up = b.bit_and(g, b.bit_or(b.bit_or(n[1], n[0]), n[3]));
  Word body = concat(slice(n, 3, M), exp_pre);
  body = increment(b, body, round_up);
  const Word exp_post = slice(body, M, E);
  const Wire inf = b.bit_or(and_reduce(b, exp_pre), and_reduce(b, exp_post));

  Parts r;
  r.sign = b.bit_and(a.sign, b.bit_not(b.bit_and(exact_zero, op)));
  r.exp = or_bit(b, exp_post, inf);
  r.mant = and_bit(b, slice(body, 0, M), b.bit_not(inf));

  const Wire a_special = and_reduce(b, a.exp);
  const Wire a_mant_nz = or_reduce(b, a.mant);
  const Wire c_inf = b.bit_and(and_reduce(b, c.exp), is_zero(b, c.mant));
  const Wire nan = b.bit_and(a_special, b.bit_or(a_mant_nz, b.bit_and(c_inf, op)));
  r.sign = words::mux(b, a_special, Word{a.sign}, Word{r.sign})[0];
  return apply_specials(b, r, a_special, nan);
}

Word sub(CircuitBuilder& b, const Word& x, const Word& y) { return add(b, x, negate(b, y)); }

Word mul(CircuitBuilder& b, const Word& x, const Word& y) {
  const FloatFormat f = b.precision();
  const auto M = static_cast<std::size_t>(f.mantissa_bits());
  const auto E = static_cast<std::size_t>(f.exponent_bits());
  const Parts a = unpack(b, x), c = unpack(b, y);

  const Wire ha = or_reduce(b, a.exp), hc = or_reduce(b, c.exp);
  Word ea = a.exp, ec = c.exp;
  ea[0] = b.bit_xor(ea[0], b.bit_not(ha));
  ec[0] = b.bit_xor(ec[0], b.bit_not(hc));
  Word ma = a.mant, mc = c.mant;
  ma.push_back(ha);
  mc.push_back(hc);
  Word p = multiply(b, ma, mc);  // 2M+2 bits, leading position 2M+1

  // em1 = ea + eb - bias, in E+2 bit two's complement.
  const std::size_t W = E + 2;
  const std::uint64_t mask = (std::uint64_t{1} << W) - 1;
  Word em1 = words::add(b, zero_extend(b, ea, W), zero_extend(b, ec, W), b.constant(false));
  em1 = words::add(b, em1, constant(b, (~static_cast<std::uint64_t>(f.bias()) + 1) & mask, W), b.constant(false));
  const Wire neg = em1[W - 1];
  Word allowance = and_bit(b, slice(em1, 0, W - 1), b.bit_not(neg));
  const Word rshift = and_bit(b, slice(negate_if(b, em1, neg), 0, W - 1), neg);

  p = normalize_left(b, p, &allowance, nullptr, 2 * M + 2);
  p = shift_right_sticky(b, p, rshift);
  const Wire top = p[2 * M + 1];

  Wire carry = b.constant(false);
  const Word a1 = increment(b, allowance, b.constant(true), &carry);
  const Word exp_wide = and_bit(b, concat(a1, Word{carry}), top);
  const Wire ovf = b.bit_or(and_reduce(b, slice(exp_wide, 0, E)), or_reduce(b, slice(exp_wide, E, exp_wide.size() - E)));

  const Wire g = p[M];
  const Wire sticky = or_reduce(b, slice(p, 0, M));
  const Wire round_up = b.bit_and(g, b.bit_or(sticky, p[M + 1]));
  Word body = concat(slice(p, M + 1, M), slice(exp_wide, 0, E));
  body = increment(b, body, round_up);
  const Word exp_post = slice(body, M, E);
  const Wire inf = b.bit_or(ovf, and_reduce(b, exp_post));

  Parts r;
  r.sign = b.bit_xor(a.sign, c.sign);
  r.exp = or_bit(b, exp_post, inf);
  r.mant = and_bit(b, slice(body, 0, M), b.bit_not(inf));

  const Wire a_special = and_reduce(b, a.exp), c_special = and_reduce(b, c.exp);
  const Wire a_mz = is_zero(b, a.mant), c_mz = is_zero(b, c.mant);
  const Wire a_zero = b.bit_and(b.bit_not(ha), a_mz), c_zero = b.bit_and(b.bit_not(hc), c_mz);
  const Wire a_nan = b.bit_and(a_special, b.bit_not(a_mz)), c_nan = b.bit_and(c_special, b.bit_not(c_mz));
  const Wire inf_times_zero = b.bit_or(b.bit_and(a_special, c_zero), b.bit_and(c_special, a_zero));
  const Wire nan = b.bit_or(b.bit_or(a_nan, c_nan), inf_times_zero);
  return apply_specials(b, r, b.bit_or(a_special, c_special), nan);
}

Word exp2(CircuitBuilder& b, const Word& x) {
  const FloatFormat f = b.precision();
  const auto M = static_cast<std::size_t>(f.mantissa_bits());
  const auto E = static_cast<std::size_t>(f.exponent_bits());
  const Exp2Params prm = exp2_params(f);
  const auto I = static_cast<std::size_t>(prm.int_bits);
  const auto F = static_cast<std::size_t>(prm.frac_bits);
  const Parts a = unpack(b, x);

  const Wire normal = or_reduce(b, a.exp);
  const Wire special = and_reduce(b, a.exp);
  const Wire nan = b.bit_and(special, b.bit_not(is_zero(b, a.mant)));

  // |x| as fixed point with F fraction bits, saturating at 2^I.
  const std::size_t L = I + F;
  Word mag = zeros(b, L - 1 - M);
  mag = concat(mag, a.mant);
  mag.push_back(normal);
  Word r = words::sub(b, constant(b, static_cast<std::uint64_t>(f.bias()) + I - 1, E + 1), zero_extend(b, a.exp, E + 1));
  const Wire sat = r[E];
  mag = shift_right(b, mag, slice(r, 0, E));
  mag.push_back(b.constant(false));
  const Word v = negate_if(b, mag, a.sign);

  const Word frac = slice(v, 0, F);
  Word ipart = slice(v, F, I + 1);
  while (ipart.size() < E + 1) ipart.push_back(ipart.back());
  const Word e_out = words::add(b, ipart, constant(b, static_cast<std::uint64_t>(f.bias()), E + 1), b.constant(false));
  const Word e_field = slice(e_out, 0, E);
  const Wire under = b.bit_or(e_out[E], is_zero(b, e_field));

  const Fixed pw = exp2_unit(b, frac, static_cast<int>(F), prm);
  const auto pr = static_cast<std::size_t>(pw.frac);
  Word mant = slice(pw.bits, pr - M, M);
  mant = or_bit(b, mant, pw.bits[pr + 1]);

  const Wire zero_res = b.bit_or(b.bit_and(sat, a.sign), b.bit_and(b.bit_not(sat), under));
  const Wire inf_res = b.bit_and(sat, b.bit_not(a.sign));
  Parts out;
  out.sign = b.constant(false);
  out.exp = and_bit(b, e_field, b.bit_not(zero_res));
  out.mant = and_bit(b, mant, b.bit_not(zero_res));
  return apply_specials(b, out, b.bit_or(inf_res, nan), nan);
}

Word log2(CircuitBuilder& b, const Word& x) {
  const FloatFormat f = b.precision();
  const auto M = static_cast<std::size_t>(f.mantissa_bits());
  const auto E = static_cast<std::size_t>(f.exponent_bits());
  const Log2Params prm = log2_params(f);
  const int k = prm.table_bits;
  const auto K = static_cast<std::size_t>(k);
  const int rb = prm.recip_bits;
  const Parts a = unpack(b, x);

  // Nearest table point j = round(frac(m) * 2^k), j in [0, 2^k].
  const Word t = slice(a.mant, M - K - 1, K + 1);
  Wire carry = b.constant(false);
  Word j = increment(b, slice(t, 1, K), t[0], &carry);
  j.push_back(carry);

  std::vector<std::vector<bool>> rtab, ltab;
  const int lf = prm.table_frac;
  for (int i = 0; i <= (1 << k); ++i) {
    Big rv;
    if (i == (1 << k)) {
      rv = Big(1) / 2;
    } else {
      rv = boost::multiprecision::round(boost::multiprecision::ldexp(Big(1) / (Big(1) + Big(i) / Big(1 << k)), rb));
      rv = boost::multiprecision::ldexp(rv, -rb);
    }
    rtab.push_back(fixed_constant(rv, rb, rb + 1));
    ltab.push_back(fixed_constant(-boost::multiprecision::log(rv) / big_ln2(), lf, lf + 1));
  }
  const Word r = lookup(b, j, rtab);
  const Word lj = lookup(b, j, ltab);

  // u = m * r - 1, exact, in two's complement with M+rb fraction bits.
  Word mfull = a.mant;
  mfull.push_back(b.constant(true));
  const Word mr = multiply(b, mfull, r);
  const std::size_t uf = M + static_cast<std::size_t>(rb);
  const Wire su = b.bit_not(mr[uf]);
  const Word uabs = negate_if(b, slice(mr, 0, uf - K), su);
  const Fixed u{uabs, static_cast<int>(uf)};

  // g(u) = log2(1+u)/u = sum (-u)^i / ((i+1) ln 2), by Horner with tapered widths.
  const Big l2e = Big(1) / big_ln2();
  const int pl = prm.precision + 2;
  const auto prec_at = [&](int i) { return std::max(pl - k * i, k + 2); };
  Fixed acc = const_fixed(b, l2e / Big(prm.degree + 1), prec_at(prm.degree - 1), 1);
  const Wire nsu = b.bit_not(su);
  for (int i = prm.degree - 1; i >= 0; --i) {
    const int ti = prec_at(i);
    const Fixed prod = mul_fixed(b, reshape(b, u, ti, -k), reshape(b, acc, ti, 1), ti, 1);
    const Fixed c = const_fixed(b, l2e / Big(i + 1), ti, 1);
    acc = Fixed{words::add(b, c.bits, xor_bit(b, prod.bits, nsu), nsu), ti};
  }

  // Y = (e - bias) + L_j + u * g(u).
  const Word pmag = multiply(b, u.bits, acc.bits);
  const std::size_t fy = uf + static_cast<std::size_t>(acc.frac);
  const std::size_t W = fy + E + 1;
  const std::uint64_t mask = (std::uint64_t{1} << (E + 1)) - 1;
  const Word ipart = words::add(b, zero_extend(b, a.exp, E + 1),
                         constant(b, (~static_cast<std::uint64_t>(f.bias()) + 1) & mask, E + 1), lj[static_cast<std::size_t>(lf)]);
  Word ybase = zeros(b, fy - static_cast<std::size_t>(lf));
  ybase = concat(ybase, slice(lj, 0, static_cast<std::size_t>(lf)));
  ybase = concat(ybase, ipart);
  const Word ysmall = xor_bit(b, zero_extend(b, pmag, W), su);
  const Word yv = words::add(b, ybase, ysmall, su);

  const Wire sy = yv[W - 1];
  Word ym = slice(negate_if(b, yv, sy), 0, W - 1);
  Word lz;
  ym = normalize_left(b, ym, nullptr, &lz, M + 1);
  const Wire top = ym[W - 2];
  // biased exponent = bias + (W-2) - fy - lz
  const std::uint64_t base = static_cast<std::uint64_t>(f.bias()) + (W - 2) - fy;
  const Word e_res = words::sub(b, constant(b, base, E + 1), zero_extend(b, lz, E + 1));

  const Wire e_zero = is_zero(b, a.exp);
  const Wire e_ones = and_reduce(b, a.exp);
  const Wire m_nz = or_reduce(b, a.mant);
  const Wire nan = b.bit_or(b.bit_or(a.sign, e_zero), b.bit_and(e_ones, m_nz));

  Parts out;
  out.sign = b.bit_and(sy, b.bit_not(e_ones));
  out.exp = and_bit(b, slice(e_res, 0, E), top);
  out.mant = slice(ym, W - 2 - M, M);
  return apply_specials(b, out, b.bit_or(nan, e_ones), nan);
}

}  // namespace fp

namespace {

template <typename Fn>
Circuit build_binary(FloatFormat fmt, Fn fn) {
  CircuitBuilder b(fmt);
  const Word x = b.add_input("x", Party::Client, fmt.bits());
  const Word y = b.add_input("y", Party::Server, fmt.bits());
  b.add_output("z", fn(b, x, y));
  return std::move(b).finish();
}

template <typename Fn>
Circuit build_unary(FloatFormat fmt, Fn fn) {
  CircuitBuilder b(fmt);
  const Word x = b.add_input("x", Party::Client, fmt.bits());
  b.add_output("z", fn(b, x));
  return std::move(b).finish();
}

}  // namespace

Circuit build_fp_add(FloatFormat fmt) { return build_binary(fmt, fp::add); }
Circuit build_fp_mul(FloatFormat fmt) { return build_binary(fmt, fp::mul); }
Circuit build_fp_exp2(FloatFormat fmt) { return build_unary(fmt, fp::exp2); }
Circuit build_fp_log2(FloatFormat fmt) { return build_unary(fmt, fp::log2); }

Circuit build_mux(FloatFormat fmt) {
  CircuitBuilder b(fmt);
  const Word c = b.add_input("c", Party::Client, 1);
  const Word x = b.add_input("x", Party::Client, fmt.bits());
  const Word y = b.add_input("y", Party::Server, fmt.bits());
  b.add_output("z", fp::mux(b, c[0], x, y));
  return std::move(b).finish();
}

const BlockCosts& measured_block_costs(FloatFormat fmt) {
  static std::once_flag once32, once64;
  static BlockCosts c32, c64;
  const auto fill = [](BlockCosts& c, FloatFormat f) {
    c.add = stats(build_fp_add(f)).and_count;
    c.mul = stats(build_fp_mul(f)).and_count;
    c.exp2 = stats(build_fp_exp2(f)).and_count;
    c.log2 = stats(build_fp_log2(f)).and_count;
    c.mux = stats(build_mux(f)).and_count;
  };
  if (fmt.bits() == 32) {
    std::call_once(once32, fill, c32, fmt);
    return c32;
  }
  std::call_once(once64, fill, c64, fmt);
  return c64;
}

}  // namespace cryptospn
