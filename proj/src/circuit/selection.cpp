#include "cryptospn/circuit/selection.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cryptospn {
namespace {

std::uint32_t padded_size(std::uint32_t m) {
  std::uint32_t p = 1;
  while (p < m) p <<= 1;
  return p;
}

// Control bit order of a Beneš network on n wires: input column, upper
// subnetwork, lower subnetwork, output column.
void benes_apply(CircuitBuilder& b, std::vector<Word>& w, std::size_t first, std::uint32_t n, const Word& control,
                 std::size_t& pos) {
  if (n < 2) return;
  if (n == 2) {
    words::cond_swap(b, control[pos++], w[first], w[first + 1]);
    return;
  }
  const std::uint32_t half = n / 2;
  std::vector<Word> upper(half), lower(half);
  for (std::uint32_t s = 0; s < half; ++s) {
    Word top = w[first + 2 * s], bottom = w[first + 2 * s + 1];
    words::cond_swap(b, control[pos++], top, bottom);
    upper[s] = std::move(top);
    lower[s] = std::move(bottom);
  }
  benes_apply(b, upper, 0, half, control, pos);
  benes_apply(b, lower, 0, half, control, pos);
  for (std::uint32_t s = 0; s < half; ++s) {
    Word top = std::move(upper[s]), bottom = std::move(lower[s]);
    words::cond_swap(b, control[pos++], top, bottom);
    w[first + 2 * s] = std::move(top);
    w[first + 2 * s + 1] = std::move(bottom);
  }
}

// Looping algorithm. `src[j]` is the input wire routed to output j.
void benes_route(const std::vector<std::uint32_t>& src, std::vector<bool>& bits) {
  const auto n = static_cast<std::uint32_t>(src.size());
  if (n < 2) return;
  if (n == 2) {
    bits.push_back(src[0] == 1);
    return;
  }
  const std::uint32_t half = n / 2;
  std::vector<std::uint32_t> inv(n);
  for (std::uint32_t j = 0; j < n; ++j) inv[src[j]] = j;
  std::vector<int> in_net(n, -1), out_net(n, -1);
  for (std::uint32_t o = 0; o < half; ++o) {
    if (out_net[2 * o] != -1) continue;
    std::uint32_t j = 2 * o;
    for (;;) {
      out_net[j] = 0;
      out_net[j ^ 1U] = 1;
      const std::uint32_t i = src[j];
      in_net[i] = 0;
      in_net[i ^ 1U] = 1;
      const std::uint32_t j2 = inv[i ^ 1U];  // routed through subnet 1
      out_net[j2] = 1;
      out_net[j2 ^ 1U] = 0;
      j = j2 ^ 1U;  // must come from subnet 0
      if (in_net[src[j]] != -1) break;
    }
  }
  std::vector<std::uint32_t> up(half), down(half);
  for (std::uint32_t j = 0; j < n; ++j) {
    const std::uint32_t i = src[j];
    (out_net[j] == 0 ? up : down)[j / 2] = i / 2;
  }
  for (std::uint32_t s = 0; s < half; ++s) bits.push_back(in_net[2 * s] == 1);
  benes_route(up, bits);
  benes_route(down, bits);
  for (std::uint32_t o = 0; o < half; ++o) bits.push_back(out_net[2 * o] == 1);
}

}  // namespace

void SelectionSpec::check() const {
  if (n == 0) throw std::invalid_argument("selection: n must be positive");
  if (m < n) throw std::invalid_argument("selection: m must be >= n");
  if (phi.size() != m) throw std::invalid_argument("selection: phi must have m entries");
  for (auto v : phi) {
    if (v >= n) throw std::invalid_argument("selection: phi entry " + std::to_string(v) + " out of range");
  }
}

double c_sel(std::uint32_t n, std::uint32_t m) {
  const double dn = n, dm = m;
  return 0.5 * (dn + dm) * std::log2(dn) + dm * std::log2(dm) - dn + 1.0;
}

std::uint64_t benes_switches(std::uint32_t n) {
  if (n < 2) return 0;
  std::uint64_t lg = 0;
  while ((std::uint64_t{1} << lg) < n) ++lg;
  return std::uint64_t{n} * lg - n / 2;
}

std::uint64_t selection_switches(std::uint32_t n, std::uint32_t m) {
  if (n == 0 || m < n) throw std::invalid_argument("selection: need 1 <= n <= m");
  return 2 * benes_switches(padded_size(m)) + (m - 1);
}

std::vector<Word> selection_network(CircuitBuilder& b, const std::vector<Word>& inputs, std::uint32_t m,
                                    const Word& control) {
  const auto n = static_cast<std::uint32_t>(inputs.size());
  if (control.size() != selection_switches(n, m)) throw std::invalid_argument("selection: wrong control width");
  const std::uint32_t p = padded_size(m);
  std::vector<Word> w(p);
  for (std::uint32_t i = 0; i < p; ++i) w[i] = inputs[i < n ? i : 0];
  std::size_t pos = 0;
  benes_apply(b, w, 0, p, control, pos);
  for (std::uint32_t t = 1; t < m; ++t) w[t] = words::mux(b, control[pos++], w[t - 1], w[t]);
  benes_apply(b, w, 0, p, control, pos);
  w.resize(m);
  return w;
}

std::vector<bool> program_selection(const SelectionSpec& spec) {
  spec.check();
  const std::uint32_t p = padded_size(spec.m);
  std::vector<std::uint32_t> count(spec.n, 0);
  for (auto v : spec.phi) ++count[v];

  // First permutation: each used input starts a block as long as its use count.
  std::vector<std::uint32_t> first(p), block_start(spec.n, 0);
  std::vector<bool> taken(p, false), is_start(spec.m, false);
  std::uint32_t cursor = 0;
  for (std::uint32_t u = 0; u < spec.n; ++u) {
    if (count[u] == 0) continue;
    block_start[u] = cursor;
    is_start[cursor] = true;
    first[cursor] = u;
    taken[u] = true;
    cursor += count[u];
  }
  std::uint32_t spare = 0;
  for (std::uint32_t pos = 0; pos < p; ++pos) {
    if (pos < spec.m && is_start[pos]) continue;
    while (taken[spare]) ++spare;
    first[pos] = spare;
    taken[spare] = true;
  }

  // Second permutation: output j takes the next unused copy in phi[j]'s block.
  std::vector<std::uint32_t> second(p), next(spec.n, 0);
  std::vector<bool> used(p, false);
  for (std::uint32_t j = 0; j < spec.m; ++j) {
    const std::uint32_t u = spec.phi[j];
    second[j] = block_start[u] + next[u]++;
    used[second[j]] = true;
  }
  spare = 0;
  for (std::uint32_t j = spec.m; j < p; ++j) {
    while (used[spare]) ++spare;
    second[j] = spare;
    used[spare] = true;
  }

  std::vector<bool> bits;
  bits.reserve(selection_switches(spec.n, spec.m));
  benes_route(first, bits);
  for (std::uint32_t t = 1; t < spec.m; ++t) bits.push_back(!is_start[t]);
  benes_route(second, bits);
  return bits;
}

Circuit build_selection_network(const SelectionSpec& spec, FloatFormat fmt, std::uint32_t width) {
  spec.check();
  if (width == 0) width = fmt.bits();
  CircuitBuilder b(fmt);
  const Word x = b.add_input("x", Party::Client, spec.n * width);
  const Word ctrl = b.add_input("control", Party::Server, static_cast<std::uint32_t>(selection_switches(spec.n, spec.m)));
  std::vector<Word> in(spec.n);
  for (std::uint32_t i = 0; i < spec.n; ++i) in[i] = words::slice(x, std::size_t{i} * width, width);
  const auto out = selection_network(b, in, spec.m, ctrl);
  Word z;
  for (const auto& w : out) z = words::concat(z, w);
  b.add_output("z", z);
  return std::move(b).finish();
}

}  // namespace cryptospn
