#include "cryptospn/gc/garble.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "cryptospn/errors.hpp"

namespace cryptospn {
namespace {

const TweakHash& hasher() {
  static const TweakHash h;
  return h;
}

std::vector<Wire> output_wires(const Circuit& c) {
  std::vector<Wire> w;
  for (const auto& o : c.outputs) w.insert(w.end(), o.wires.begin(), o.wires.end());
  return w;
}

}  // namespace

std::vector<Wire> party_input_wires(const Circuit& circuit, Party party) {
  std::vector<Wire> w;
  for (const auto& g : circuit.input_groups) {
    if (g.party != party) continue;
    for (std::uint32_t i = 0; i < g.width; ++i) w.push_back(g.first + i);
  }
  return w;
}

Garbler::Garbler(const Circuit& circuit, AesPrg& prg) : circuit_(circuit) {
  delta_ = _mm_or_si128(prg.next(), make_block(0, 1));
  labels_.resize(circuit.num_wires());
  for (Wire i = 0; i < circuit.num_inputs; ++i) labels_[i] = prg.next();
}

void Garbler::garble(const Sink& sink, std::size_t chunk_bytes) {
  const TweakHash& h = hasher();
  const Circuit& c = circuit_;
  const Block delta = delta_;
  Block* L = labels_.data();
  chunk_bytes = std::max(kAndGateBytes, chunk_bytes / kAndGateBytes * kAndGateBytes);
  std::vector<std::uint8_t> buf(chunk_bytes);
  std::size_t fill = 0;
  const Wire ni = c.num_inputs;
  const std::size_t n = c.num_gates();
  for (std::size_t g = 0; g < n; ++g) {
    const Wire a = c.lhs[g], b = c.rhs[g];
    Block& out = L[ni + g];
    switch (c.kinds[g]) {
      case GateKind::Xor: out = _mm_xor_si128(L[a], L[b]); break;
      case GateKind::Inv: out = _mm_xor_si128(L[a], delta); break;
      case GateKind::Const: out = a ? delta : zero_block(); break;
      case GateKind::And: {
        const Block a0 = L[a], b0 = L[b];
        const bool pa = lsb(a0), pb = lsb(b0);
        Block hs[4] = {a0, _mm_xor_si128(a0, delta), b0, _mm_xor_si128(b0, delta)};
        const std::uint64_t j0 = 2 * static_cast<std::uint64_t>(g), j1 = j0 + 1;
        const std::uint64_t tw[4] = {j0, j0, j1, j1};
        h.hash_n<4>(hs, tw);
        const Block tg = _mm_xor_si128(_mm_xor_si128(hs[0], hs[1]), select(pb, delta));
        const Block wg = _mm_xor_si128(hs[0], select(pa, tg));
        const Block te = _mm_xor_si128(_mm_xor_si128(hs[2], hs[3]), a0);
        const Block we = _mm_xor_si128(hs[2], select(pb, _mm_xor_si128(te, a0)));
        out = _mm_xor_si128(wg, we);
        store_block(buf.data() + fill, tg);
        store_block(buf.data() + fill + kLabelBytes, te);
        fill += kAndGateBytes;
        if (fill == buf.size()) {
          sink(buf.data(), fill);
          fill = 0;
        }
        break;
      }
    }
  }
  if (fill > 0) sink(buf.data(), fill);
  decode_.clear();
  for (auto w : output_wires(c)) decode_.push_back(lsb(L[w]));
}

std::vector<Block> GarbleResult::encode(const Circuit& circuit, const BitVector& client_bits,
                                        const BitVector& server_bits) const {
  std::vector<Block> labels(circuit.num_inputs);
  auto fill = [&](Party p, const BitVector& bits) {
    const auto wires = party_input_wires(circuit, p);
    if (wires.size() != bits.size()) {
      throw std::invalid_argument(std::string(to_string(p)) + " input has " + std::to_string(bits.size()) +
                                  " bits, circuit expects " + std::to_string(wires.size()));
    }
    for (std::size_t i = 0; i < wires.size(); ++i) {
      const Wire w = wires[i];
      labels[w] = bits[i] ? _mm_xor_si128(input_zero_labels[w], delta) : input_zero_labels[w];
    }
  };
  fill(Party::Client, client_bits);
  fill(Party::Server, server_bits);
  return labels;
}

GarbleResult garble(const Circuit& circuit, std::uint64_t seed) {
  AesPrg prg = AesPrg::from_u64(seed);
  Garbler g(circuit, prg);
  GarbleResult r;
  r.gc.tables.reserve(kAndGateBytes * stats(circuit).and_count);
  g.garble([&](const std::uint8_t* p, std::size_t n) { r.gc.tables.insert(r.gc.tables.end(), p, p + n); });
  r.gc.decode = g.decode_table();
  r.delta = g.delta();
  r.input_zero_labels.resize(circuit.num_inputs);
  for (Wire i = 0; i < circuit.num_inputs; ++i) r.input_zero_labels[i] = g.zero_label(i);
  return r;
}

std::vector<Block> evaluate_garbled(const Circuit& c, std::span<const std::uint8_t> tables,
                                    const std::vector<Block>& input_labels) {
  if (input_labels.size() != c.num_inputs) throw std::invalid_argument("one label per input wire is required");
  std::size_t ands = 0;
  for (auto k : c.kinds) ands += k == GateKind::And;
  if (tables.size() != ands * kAndGateBytes) {
    throw ProtocolError("garbled table stream has " + std::to_string(tables.size()) + " bytes, expected " +
                        std::to_string(ands * kAndGateBytes));
  }
  const TweakHash& h = hasher();
  std::vector<Block> L(c.num_wires());
  std::copy(input_labels.begin(), input_labels.end(), L.begin());
  const Wire ni = c.num_inputs;
  const std::uint8_t* t = tables.data();
  const std::size_t n = c.num_gates();
  for (std::size_t g = 0; g < n; ++g) {
    const Wire a = c.lhs[g], b = c.rhs[g];
    Block& out = L[ni + g];
    switch (c.kinds[g]) {
      case GateKind::Xor: out = _mm_xor_si128(L[a], L[b]); break;
      case GateKind::Inv: out = L[a]; break;
      case GateKind::Const: out = zero_block(); break;
      case GateKind::And: {
        const Block la = L[a], lb = L[b];
        const Block tg = load_block(t), te = load_block(t + kLabelBytes);
        t += kAndGateBytes;
        Block hs[2] = {la, lb};
        const std::uint64_t j0 = 2 * static_cast<std::uint64_t>(g);
        const std::uint64_t tw[2] = {j0, j0 + 1};
        h.hash_n<2>(hs, tw);
        const Block wg = _mm_xor_si128(hs[0], select(lsb(la), tg));
        const Block we = _mm_xor_si128(hs[1], select(lsb(lb), _mm_xor_si128(te, la)));
        out = _mm_xor_si128(wg, we);
        break;
      }
    }
  }
  std::vector<Block> outs;
  for (auto w : output_wires(c)) outs.push_back(L[w]);
  return outs;
}

BitVector decode_labels(const std::vector<Block>& output_labels, const BitVector& decode) {
  if (output_labels.size() != decode.size()) throw ProtocolError("decode table does not match the output width");
  BitVector bits(decode.size());
  for (std::size_t i = 0; i < decode.size(); ++i) bits[i] = lsb(output_labels[i]) != decode[i];
  return bits;
}

}  // namespace cryptospn
