#include "cryptospn/compiler/compiler.hpp"

#include <cmath>

#include "cryptospn/circuit/builder.hpp"
#include "cryptospn/circuit/float_blocks.hpp"
#include "cryptospn/errors.hpp"
#include "cryptospn/spn/inference.hpp"
#include "cryptospn/spn/json_io.hpp"
#include "cryptospn/spn/validate.hpp"

namespace cryptospn {

const char* to_string(InputTag tag) {
  switch (tag) {
    case InputTag::RvValue: return "rv_value";
    case InputTag::RvKnownFlag: return "rv_known_flag";
    case InputTag::RvLogFactorial: return "rv_log_factorial";
    case InputTag::LeafParam: return "leaf_param";
    case InputTag::SumWeight: return "sum_weight";
    case InputTag::SelectionControl: return "selection_control";
  }
  return "?";
}

InputTag input_tag_from_string(const std::string& s) {
  for (auto t : {InputTag::RvValue, InputTag::RvKnownFlag, InputTag::RvLogFactorial, InputTag::LeafParam,
                 InputTag::SumWeight, InputTag::SelectionControl}) {
    if (s == to_string(t)) return t;
  }
  throw InputError("unknown input tag '" + s + "'");
}

std::uint64_t InputLayout::total_bits() const {
  return entries.empty() ? 0 : entries.back().offset + entries.back().width;
}

std::uint64_t InputLayout::bits_with_tag(InputTag tag) const {
  std::uint64_t k = 0;
  for (const auto& e : entries) {
    if (e.tag == tag) k += e.width;
  }
  return k;
}

void CompiledSpn::check() const {
  std::size_t ci = 0, si = 0;
  std::uint64_t client_off = 0, server_off = 0;
  for (const auto& g : circuit.input_groups) {
    const bool client = g.party == Party::Client;
    const auto& lay = client ? client_layout : server_layout;
    std::size_t& idx = client ? ci : si;
    std::uint64_t& off = client ? client_off : server_off;
    if (idx >= lay.entries.size()) throw DomainError("layout does not cover input group '" + g.name + "'");
    const auto& e = lay.entries[idx++];
    if (e.name != g.name || e.width != g.width || e.offset != off) {
      throw DomainError("layout entry '" + e.name + "' does not match input group '" + g.name + "'");
    }
    off += g.width;
  }
  if (ci != client_layout.entries.size() || si != server_layout.entries.size()) {
    throw DomainError("layout has entries without input groups");
  }
  if (circuit.outputs.size() != 1 || circuit.outputs[0].name != kOutputName ||
      circuit.outputs[0].wires.size() != static_cast<std::size_t>(precision.bits())) {
    throw DomainError("circuit output must be a single word named log2_prob");
  }
  if (circuit.precision != precision) throw DomainError("circuit precision does not match layout");
}

std::vector<std::uint32_t> leaf_rv_map(const SpnGraph& spn) {
  std::vector<std::uint32_t> phi;
  for (auto i : spn.leaves()) phi.push_back(spn.node(i).rv);
  return phi;
}

namespace {

std::uint32_t value_width(LeafFamily family, FloatFormat fmt) {
  return family == LeafFamily::Bernoulli ? 1U : static_cast<std::uint32_t>(fmt.bits());
}

std::uint32_t params_per_leaf(LeafFamily family) { return family == LeafFamily::Gaussian ? 3U : 2U; }

const char* param_name(LeafFamily family, std::uint32_t k) {
  switch (family) {
    case LeafFamily::Gaussian: return k == 0 ? "mu" : k == 1 ? "s1" : "s2";
    case LeafFamily::Poisson: return k == 0 ? "s1" : "s2";
    case LeafFamily::Bernoulli: return k == 0 ? "log2p" : "log2q";
  }
  return "?";
}

class LayoutBuilder {
 public:
  LayoutBuilder(CircuitBuilder& b, Party party, InputLayout& layout) : b_(b), party_(party), layout_(layout) {}

  Word add(std::string name, std::uint32_t width, InputTag tag) {
    layout_.entries.push_back(LayoutEntry{name, offset_, width, tag});
    offset_ += width;
    return b_.add_input(std::move(name), party_, width);
  }

 private:
  CircuitBuilder& b_;
  Party party_;
  InputLayout& layout_;
  std::uint64_t offset_ = 0;
};

}  // namespace

CompiledSpn compile(const SpnGraph& spn, FloatFormat fmt, bool hide_scope, bool marginals) {
  require_valid(spn);
  CompiledSpn out;
  out.precision = fmt;
  out.hide_scope = hide_scope;
  out.marginals = marginals;
  out.spn_digest = spn_digest(spn);
  out.num_rvs = spn.num_rvs();
  out.family = spn.family();

  const std::uint32_t n = spn.num_rvs();
  const LeafFamily fam = spn.family();
  const auto leaves = spn.leaves();
  const auto m = static_cast<std::uint32_t>(leaves.size());
  out.num_leaves = m;
  if (hide_scope && m < n) {
    throw DomainError("scope hiding needs at least as many leaves (" + std::to_string(m) + ") as random variables (" +
                      std::to_string(n) + ")");
  }
  const auto bw = static_cast<std::uint32_t>(fmt.bits());
  const std::uint32_t vw = value_width(fam, fmt);

  CircuitBuilder b(fmt);
  LayoutBuilder client(b, Party::Client, out.client_layout);
  LayoutBuilder server(b, Party::Server, out.server_layout);

  std::vector<Word> x(n), c1(n), known(n);
  for (std::uint32_t j = 0; j < n; ++j) x[j] = client.add("x[" + std::to_string(j) + "]", vw, InputTag::RvValue);
  if (fam == LeafFamily::Poisson) {
    for (std::uint32_t j = 0; j < n; ++j) c1[j] = client.add("c1[" + std::to_string(j) + "]", bw, InputTag::RvLogFactorial);
  }
  if (marginals) {
    for (std::uint32_t j = 0; j < n; ++j) known[j] = client.add("known[" + std::to_string(j) + "]", 1, InputTag::RvKnownFlag);
  }

  const std::uint32_t pcount = params_per_leaf(fam);
  std::vector<std::vector<Word>> params(m);
  for (std::uint32_t i = 0; i < m; ++i) {
    for (std::uint32_t k = 0; k < pcount; ++k) {
      params[i].push_back(server.add("leaf[" + std::to_string(i) + "]." + param_name(fam, k), bw, InputTag::LeafParam));
    }
  }
  std::vector<std::vector<Word>> logw(spn.size());
  for (std::uint32_t i = 0; i < spn.size(); ++i) {
    const Node& nd = spn.node(i);
    if (nd.type != NodeType::Sum) continue;
    for (std::size_t k = 0; k < nd.children.size(); ++k) {
      logw[i].push_back(server.add("sum[" + std::to_string(i) + "].log2w[" + std::to_string(k) + "]", bw, InputTag::SumWeight));
    }
  }
  Word control;
  if (hide_scope) {
    out.selection_switches = selection_switches(n, m);
    control = server.add("selection", static_cast<std::uint32_t>(out.selection_switches), InputTag::SelectionControl);
  }

  // Per-leaf view of the client's variables.
  std::vector<Word> lx(m), lc1(m), lknown(m);
  if (hide_scope) {
    std::vector<Word> routed(n);
    for (std::uint32_t j = 0; j < n; ++j) {
      routed[j] = x[j];
      if (fam == LeafFamily::Poisson) routed[j] = words::concat(routed[j], c1[j]);
      if (marginals) routed[j] = words::concat(routed[j], known[j]);
    }
    out.selection_width = static_cast<std::uint32_t>(routed[0].size());
    const auto sel = selection_network(b, routed, m, control);
    for (std::uint32_t i = 0; i < m; ++i) {
      std::size_t pos = 0;
      lx[i] = words::slice(sel[i], pos, vw);
      pos += vw;
      if (fam == LeafFamily::Poisson) {
        lc1[i] = words::slice(sel[i], pos, bw);
        pos += bw;
      }
      if (marginals) lknown[i] = words::slice(sel[i], pos, 1);
    }
  } else {
    for (std::uint32_t i = 0; i < m; ++i) {
      const std::uint32_t rv = spn.node(leaves[i]).rv;
      lx[i] = x[rv];
      if (fam == LeafFamily::Poisson) lc1[i] = c1[rv];
      if (marginals) lknown[i] = known[rv];
    }
  }

  std::vector<Word> value(spn.size());
  const Word zero = words::zeros(b, bw);
  std::uint32_t leaf_index = 0;
  for (std::uint32_t i = 0; i < spn.size(); ++i) {
    const Node& nd = spn.node(i);
    switch (nd.type) {
      case NodeType::Leaf: {
        const std::uint32_t li = leaf_index++;
        const auto& p = params[li];
        Word v;
        switch (fam) {
          case LeafFamily::Bernoulli: v = fp::mux(b, lx[li][0], p[0], p[1]); break;
          case LeafFamily::Gaussian: {
            const Word d = fp::sub(b, lx[li], p[0]);
            const Word sq = fp::mul(b, d, d);
            v = fp::sub(b, p[1], fp::mul(b, sq, p[2]));
            break;
          }
          case LeafFamily::Poisson: v = fp::add(b, fp::add(b, fp::mul(b, lx[li], p[0]), lc1[li]), p[1]); break;
        }
        if (marginals) v = fp::mux(b, lknown[li][0], v, zero);
        value[i] = std::move(v);
        break;
      }
      case NodeType::Product: {
        std::vector<Word> xs;
        for (auto c : nd.children) xs.push_back(value[c]);
        value[i] = tree_reduce(xs, [&](Word l, Word r) { return fp::add(b, l, r); });
        break;
      }
      case NodeType::Sum: {
        std::vector<Word> xs;
        for (std::size_t k = 0; k < nd.children.size(); ++k) {
          xs.push_back(words::opaque(b, fp::exp2(b, fp::add(b, value[nd.children[k]], logw[i][k]))));
        }
        value[i] = fp::log2(b, tree_reduce(xs, [&](Word l, Word r) { return fp::add(b, l, r); }));
        break;
      }
    }
  }
  b.add_output(kOutputName, value.back());
  out.circuit = std::move(b).finish();
  return out;
}

BitVector derive_server_inputs(const SpnGraph& spn, const CompiledSpn& compiled) {
  if (spn_digest(spn) != compiled.spn_digest) throw DomainError("spn digest does not match the compiled circuit");
  const FloatFormat fmt = compiled.precision;
  BitVector bits;
  bits.reserve(compiled.server_layout.total_bits());
  for (auto li : spn.leaves()) {
    const LeafDist& dist = spn.node(li).dist;
    if (const auto* bern = std::get_if<Bernoulli>(&dist)) {
      if (bern->p <= 0.0 || bern->p >= 1.0) {
        throw DomainError("bernoulli p of 0 or 1 has an infinite log2 and cannot be encoded");
      }
    }
    const LeafCoefficients c = leaf_coefficients(dist);
    if (const auto* g = std::get_if<Gaussian>(&dist)) append_bits(bits, float_to_bits(g->mu, fmt), fmt.bits());
    append_bits(bits, float_to_bits(c.a, fmt), fmt.bits());
    append_bits(bits, float_to_bits(c.b, fmt), fmt.bits());
  }
  for (const auto& nd : spn.nodes()) {
    if (nd.type != NodeType::Sum) continue;
    for (double w : nd.weights) append_bits(bits, float_to_bits(std::log2(w), fmt), fmt.bits());
  }
  if (compiled.hide_scope) {
    SelectionSpec sel{spn.num_rvs(), static_cast<std::uint32_t>(spn.count(NodeType::Leaf)), leaf_rv_map(spn)};
    const auto ctrl = program_selection(sel);
    bits.insert(bits.end(), ctrl.begin(), ctrl.end());
  }
  if (bits.size() != compiled.server_layout.total_bits()) throw DomainError("server input width does not match layout");
  return bits;
}

BitVector derive_client_inputs(const CompiledSpn& compiled, const Evidence& ev) {
  const FloatFormat fmt = compiled.precision;
  if (ev.values.size() != compiled.num_rvs) {
    throw DomainError("evidence has " + std::to_string(ev.values.size()) + " entries, expected " +
                      std::to_string(compiled.num_rvs));
  }
  for (std::size_t j = 0; j < ev.values.size(); ++j) {
    const auto& v = ev.values[j];
    if (!v) {
      if (!compiled.marginals) throw DomainError("rv " + std::to_string(j) + " is missing but marginals are disabled");
      continue;
    }
    if (!std::isfinite(*v)) throw DomainError("evidence entry " + std::to_string(j) + " is not finite");
    if (compiled.family == LeafFamily::Bernoulli && *v != 0.0 && *v != 1.0) {
      throw DomainError("evidence entry " + std::to_string(j) + " must be 0 or 1");
    }
    if (compiled.family == LeafFamily::Poisson && (*v < 0 || std::floor(*v) != *v)) {
      throw DomainError("evidence entry " + std::to_string(j) + " must be a non-negative integer");
    }
  }
  BitVector bits;
  bits.reserve(compiled.client_layout.total_bits());
  for (const auto& v : ev.values) {
    const double x = v.value_or(0.0);
    if (compiled.family == LeafFamily::Bernoulli) {
      bits.push_back(x != 0.0);
    } else {
      append_bits(bits, float_to_bits(x, fmt), fmt.bits());
    }
  }
  if (compiled.family == LeafFamily::Poisson) {
    for (const auto& v : ev.values) append_bits(bits, float_to_bits(neg_log2_factorial(v.value_or(0.0)), fmt), fmt.bits());
  }
  if (compiled.marginals) {
    for (const auto& v : ev.values) bits.push_back(v.has_value());
  }
  if (bits.size() != compiled.client_layout.total_bits()) throw DomainError("client input width does not match layout");
  return bits;
}

double decode_output(const CompiledSpn& compiled, const BitVector& output_bits) {
  const auto b = static_cast<std::size_t>(compiled.precision.bits());
  if (output_bits.size() != b) throw DomainError("output has " + std::to_string(output_bits.size()) + " bits");
  return bits_to_float(read_bits(output_bits, 0, b), compiled.precision);
}

}  // namespace cryptospn
