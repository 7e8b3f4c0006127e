#include "cryptospn/circuit/builder.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace cryptospn {

CircuitBuilder::CircuitBuilder(FloatFormat precision) { circuit_.precision = precision; }

void CircuitBuilder::reserve(std::size_t gates) {
  circuit_.kinds.reserve(gates);
  circuit_.lhs.reserve(gates);
  circuit_.rhs.reserve(gates);
}

Word CircuitBuilder::add_input(std::string name, Party party, std::uint32_t width) {
  if (!circuit_.kinds.empty()) {
    throw std::logic_error("circuit builder: inputs must be declared before the first gate");
  }
  InputGroup group{std::move(name), party, circuit_.num_inputs, width};
  Word bits(width);
  for (std::uint32_t i = 0; i < width; ++i) bits[i] = circuit_.num_inputs + i;
  circuit_.num_inputs += width;
  circuit_.input_groups.push_back(std::move(group));
  return bits;
}

void CircuitBuilder::add_output(std::string name, const Word& bits) {
  circuit_.outputs.push_back(OutputGroup{std::move(name), bits});
}

Wire CircuitBuilder::emit(GateKind kind, Wire a, Wire b) {
  circuit_.kinds.push_back(kind);
  circuit_.lhs.push_back(a);
  circuit_.rhs.push_back(b);
  if (kind == GateKind::And) ++and_count_;
  return static_cast<Wire>(circuit_.num_inputs + circuit_.kinds.size() - 1);
}

Wire CircuitBuilder::constant(bool value) {
  Wire& slot = value ? one_ : zero_;
  if (slot == std::numeric_limits<Wire>::max()) slot = emit(GateKind::Const, value ? 1 : 0, 0);
  return slot;
}

bool CircuitBuilder::constant_value(Wire w, bool& value) const {
  if (w < circuit_.num_inputs) return false;
  const std::size_t g = w - circuit_.num_inputs;
  if (circuit_.kinds[g] != GateKind::Const) return false;
  value = circuit_.lhs[g] != 0;
  return true;
}

Wire CircuitBuilder::opaque(Wire w) {
  bool v = false;
  if (!constant_value(w, v)) return w;
  if (circuit_.num_inputs == 0) throw std::logic_error("opaque constants need an input wire");
  if (opaque_zero_ == std::numeric_limits<Wire>::max()) opaque_zero_ = emit(GateKind::Xor, 0, 0);
  if (!v) return opaque_zero_;
  if (opaque_one_ == std::numeric_limits<Wire>::max()) opaque_one_ = emit(GateKind::Inv, opaque_zero_, 0);
  return opaque_one_;
}

Wire CircuitBuilder::bit_xor(Wire a, Wire b) {
  bool va = false, vb = false;
  const bool ca = constant_value(a, va), cb = constant_value(b, vb);
  if (ca && cb) return constant(va != vb);
  if (ca) return va ? bit_not(b) : b;
  if (cb) return vb ? bit_not(a) : a;
  return emit(GateKind::Xor, a, b);
}

Wire CircuitBuilder::bit_and(Wire a, Wire b) {
  bool va = false, vb = false;
  const bool ca = constant_value(a, va), cb = constant_value(b, vb);
  if (ca && cb) return constant(va && vb);
  if (ca) return va ? b : constant(false);
  if (cb) return vb ? a : constant(false);
  return emit(GateKind::And, a, b);
}

Wire CircuitBuilder::bit_not(Wire a) {
  bool va = false;
  if (constant_value(a, va)) return constant(!va);
  return emit(GateKind::Inv, a, 0);
}

Wire CircuitBuilder::bit_or(Wire a, Wire b) {
  bool va = false, vb = false;
  const bool ca = constant_value(a, va), cb = constant_value(b, vb);
  if (ca && cb) return constant(va || vb);
  if (ca) return va ? constant(true) : b;
  if (cb) return vb ? constant(true) : a;
  return bit_xor(bit_xor(a, b), bit_and(a, b));
}

Circuit CircuitBuilder::finish() && {
  circuit_.kinds.shrink_to_fit();
  circuit_.lhs.shrink_to_fit();
  circuit_.rhs.shrink_to_fit();
  return std::move(circuit_);
}

namespace words {

Word slice(const Word& w, std::size_t offset, std::size_t length) {
  if (offset + length > w.size()) throw std::out_of_range("words::slice out of range");
  return Word(w.begin() + static_cast<std::ptrdiff_t>(offset), w.begin() + static_cast<std::ptrdiff_t>(offset + length));
}

Word opaque(CircuitBuilder& b, const Word& x) {
  Word out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = b.opaque(x[i]);
  return out;
}

Word concat(const Word& low, const Word& high) {
  Word out = low;
  out.insert(out.end(), high.begin(), high.end());
  return out;
}

Word constant(CircuitBuilder& b, std::uint64_t value, std::size_t width) {
  Word out(width);
  for (std::size_t i = 0; i < width; ++i) out[i] = b.constant(i < 64 && ((value >> i) & 1U));
  return out;
}

Word constant_bits(CircuitBuilder& b, const std::vector<bool>& bits) {
  Word out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) out[i] = b.constant(bits[i]);
  return out;
}

Word zeros(CircuitBuilder& b, std::size_t width) { return Word(width, b.constant(false)); }

Word bit_not(CircuitBuilder& b, const Word& x) {
  Word out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = b.bit_not(x[i]);
  return out;
}

Word xor_bit(CircuitBuilder& b, const Word& x, Wire c) {
  Word out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = b.bit_xor(x[i], c);
  return out;
}

Word and_bit(CircuitBuilder& b, const Word& x, Wire c) {
  Word out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = b.bit_and(x[i], c);
  return out;
}

Word add(CircuitBuilder& b, const Word& x, const Word& y, Wire carry_in, Wire* carry_out) {
  if (x.size() != y.size()) throw std::invalid_argument("words::add width mismatch");
  Word out(x.size());
  Wire c = carry_in;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Wire xc = b.bit_xor(x[i], c);
    const Wire yc = b.bit_xor(y[i], c);
    out[i] = b.bit_xor(xc, y[i]);
    // Skip the carry of the top bit unless the caller wants it.
    if (i + 1 < x.size() || carry_out != nullptr) c = b.bit_xor(c, b.bit_and(xc, yc));
  }
  if (carry_out != nullptr) *carry_out = c;
  return out;
}

Word sub(CircuitBuilder& b, const Word& x, const Word& y, Wire* no_borrow) {
  return add(b, x, bit_not(b, y), b.constant(true), no_borrow);
}

Wire less_than(CircuitBuilder& b, const Word& x, const Word& y) {
  if (x.size() != y.size()) throw std::invalid_argument("words::less_than width mismatch");
  // Carry chain of x + ~y + 1; the final carry is 1 iff x >= y.
  Wire c = b.constant(true);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Wire ny = b.bit_not(y[i]);
    const Wire xc = b.bit_xor(x[i], c);
    const Wire yc = b.bit_xor(ny, c);
    c = b.bit_xor(c, b.bit_and(xc, yc));
  }
  return b.bit_not(c);
}

Word increment(CircuitBuilder& b, const Word& x, Wire c, Wire* carry_out) {
  Word out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = b.bit_xor(x[i], c);
    if (i + 1 < x.size() || carry_out != nullptr) c = b.bit_and(x[i], c);
  }
  if (carry_out != nullptr) *carry_out = c;
  return out;
}

Word negate_if(CircuitBuilder& b, const Word& x, Wire c) { return increment(b, xor_bit(b, x, c), c); }

Word mux(CircuitBuilder& b, Wire c, const Word& x, const Word& y) {
  if (x.size() != y.size()) throw std::invalid_argument("words::mux width mismatch");
  Word out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = b.bit_xor(y[i], b.bit_and(c, b.bit_xor(x[i], y[i])));
  return out;
}

void cond_swap(CircuitBuilder& b, Wire c, Word& x, Word& y) {
  if (x.size() != y.size()) throw std::invalid_argument("words::cond_swap width mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Wire d = b.bit_and(c, b.bit_xor(x[i], y[i]));
    x[i] = b.bit_xor(x[i], d);
    y[i] = b.bit_xor(y[i], d);
  }
}

Wire or_reduce(CircuitBuilder& b, std::span<const Wire> bits) {
  if (bits.empty()) return b.constant(false);
  std::vector<Wire> layer(bits.begin(), bits.end());
  while (layer.size() > 1) {
    std::vector<Wire> next;
    next.reserve((layer.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < layer.size(); i += 2) next.push_back(b.bit_or(layer[i], layer[i + 1]));
    if (layer.size() % 2 == 1) next.push_back(layer.back());
    layer.swap(next);
  }
  return layer[0];
}

Wire and_reduce(CircuitBuilder& b, std::span<const Wire> bits) {
  if (bits.empty()) return b.constant(true);
  std::vector<Wire> layer(bits.begin(), bits.end());
  while (layer.size() > 1) {
    std::vector<Wire> next;
    next.reserve((layer.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < layer.size(); i += 2) next.push_back(b.bit_and(layer[i], layer[i + 1]));
    if (layer.size() % 2 == 1) next.push_back(layer.back());
    layer.swap(next);
  }
  return layer[0];
}

Word multiply(CircuitBuilder& b, const Word& x, const Word& y, std::size_t drop_columns) {
  const std::size_t width = x.size() + y.size();
  std::vector<std::vector<Wire>> columns(width);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (i + j < drop_columns) continue;
      const Wire p = b.bit_and(x[i], y[j]);
      bool v = false;
      if (b.constant_value(p, v) && !v) continue;
      columns[i + j].push_back(p);
    }
  }
  // Carry-save reduction to two rows with one-AND full and half adders.
  for (std::size_t col = 0; col < width; ++col) {
    auto& bits = columns[col];
    std::size_t pos = 0;
    while (bits.size() - pos > 2) {
      const Wire a = bits[pos], c = bits[pos + 1], d = bits[pos + 2];
      pos += 3;
      const Wire ac = b.bit_xor(a, d);
      const Wire cc = b.bit_xor(c, d);
      bits.push_back(b.bit_xor(ac, c));
      if (col + 1 < width) columns[col + 1].push_back(b.bit_xor(d, b.bit_and(ac, cc)));
    }
    bits.erase(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(pos));
  }
  Word row0(width), row1(width);
  for (std::size_t col = 0; col < width; ++col) {
    const auto& bits = columns[col];
    row0[col] = bits.size() > 0 ? bits[0] : b.constant(false);
    row1[col] = bits.size() > 1 ? bits[1] : b.constant(false);
  }
  return add(b, row0, row1, b.constant(false));
}

namespace {

std::size_t stages_for(std::size_t width) {
  std::size_t s = 0;
  while ((std::size_t{1} << s) < width) ++s;
  return s;
}

}  // namespace

Word shift_right_sticky(CircuitBuilder& b, const Word& x, const Word& amount) {
  const std::size_t n = x.size();
  const std::size_t stages = std::min(stages_for(n), amount.size());
  Word cur = x;
  for (std::size_t s = 0; s < stages; ++s) {
    const std::size_t k = std::size_t{1} << s;
    Word shifted(n, b.constant(false));
    shifted[0] = or_reduce(b, std::span<const Wire>(cur.data(), std::min(k + 1, n)));
    for (std::size_t i = 1; i + k < n; ++i) shifted[i] = cur[i + k];
    cur = mux(b, amount[s], shifted, cur);
  }
  if (amount.size() > stages) {
    const Wire big = or_reduce(b, std::span<const Wire>(amount.data() + stages, amount.size() - stages));
    Word collapsed(n, b.constant(false));
    collapsed[0] = or_reduce(b, cur);
    cur = mux(b, big, collapsed, cur);
  }
  return cur;
}

Word shift_right(CircuitBuilder& b, const Word& x, const Word& amount) {
  const std::size_t n = x.size();
  const std::size_t stages = std::min(stages_for(n), amount.size());
  Word cur = x;
  for (std::size_t s = 0; s < stages; ++s) {
    const std::size_t k = std::size_t{1} << s;
    Word shifted(n, b.constant(false));
    for (std::size_t i = 0; i + k < n; ++i) shifted[i] = cur[i + k];
    cur = mux(b, amount[s], shifted, cur);
  }
  if (amount.size() > stages) {
    const Wire big = or_reduce(b, std::span<const Wire>(amount.data() + stages, amount.size() - stages));
    cur = and_bit(b, cur, b.bit_not(big));
  }
  return cur;
}

Word lookup(CircuitBuilder& b, const Word& index, const std::vector<std::vector<bool>>& table) {
  if (table.empty()) throw std::invalid_argument("words::lookup on empty table");
  const std::size_t width = table.front().size();
  std::vector<Word> layer;
  const std::size_t entries = std::size_t{1} << index.size();
  layer.reserve(entries);
  for (std::size_t e = 0; e < entries; ++e) {
    layer.push_back(e < table.size() ? constant_bits(b, table[e]) : zeros(b, width));
  }
  for (std::size_t level = 0; level < index.size(); ++level) {
    std::vector<Word> next;
    next.reserve(layer.size() / 2);
    for (std::size_t i = 0; i < layer.size(); i += 2) next.push_back(mux(b, index[level], layer[i + 1], layer[i]));
    layer.swap(next);
  }
  return layer[0];
}

}  // namespace words
}  // namespace cryptospn
