#pragma once

#include <cstdint>
#include <vector>

#include "cryptospn/circuit/builder.hpp"
#include "cryptospn/circuit/circuit.hpp"

namespace cryptospn {

/// Oblivious selection of m output words from n input words: output j is
/// input phi[j].
struct SelectionSpec {
  std::uint32_t n = 0;
  std::uint32_t m = 0;
  std::vector<std::uint32_t> phi;

  /// Throws std::invalid_argument unless 1 <= n <= m and phi maps [m] into [n].
  void check() const;
};

/// Closed-form switch count estimate ½(n+m)·log2(n) + m·log2(m) − n + 1.
double c_sel(std::uint32_t n, std::uint32_t m);

/// Switches of a Beneš network on `n` (a power of two) wires.
std::uint64_t benes_switches(std::uint32_t n);

/// Programmable switches (= control bits) of the network built here:
/// a Beneš permutation, a chain of m−1 copy switches and a second Beneš
/// permutation, both on m rounded up to a power of two.
std::uint64_t selection_switches(std::uint32_t n, std::uint32_t m);

/// Emits the network. `inputs` holds n words of equal width; `control` must
/// hold selection_switches(n, m) bits. Costs width AND gates per switch.
std::vector<Word> selection_network(CircuitBuilder& b, const std::vector<Word>& inputs, std::uint32_t m,
                                    const Word& control);

/// Control bits that realize spec.phi.
std::vector<bool> program_selection(const SelectionSpec& spec);

/// Standalone network over `width`-bit words (defaults to the float width).
/// Inputs: "x" (client, n·width bits), "control" (server). Output "z" (m·width).
Circuit build_selection_network(const SelectionSpec& spec, FloatFormat fmt, std::uint32_t width = 0);

}  // namespace cryptospn
