#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cryptospn/circuit/circuit.hpp"
#include "cryptospn/circuit/selection.hpp"
#include "cryptospn/circuit/simulate.hpp"
#include "cryptospn/spn/spn.hpp"

namespace cryptospn {

enum class InputTag : std::uint8_t { RvValue, RvKnownFlag, RvLogFactorial, LeafParam, SumWeight, SelectionControl };

const char* to_string(InputTag tag);
InputTag input_tag_from_string(const std::string& s);

struct LayoutEntry {
  std::string name;
  std::uint64_t offset = 0;  // bit offset within the party's input vector
  std::uint32_t width = 0;
  InputTag tag = InputTag::RvValue;

  friend bool operator==(const LayoutEntry&, const LayoutEntry&) = default;
};

struct InputLayout {
  std::vector<LayoutEntry> entries;

  std::uint64_t total_bits() const;
  std::uint64_t bits_with_tag(InputTag tag) const;
  friend bool operator==(const InputLayout&, const InputLayout&) = default;
};

/// Public description of a compiled SPN, shared by both parties. It never
/// records which random variable a leaf reads when scope hiding is on.
struct CompiledSpn {
  Circuit circuit;
  InputLayout client_layout;
  InputLayout server_layout;
  FloatFormat precision;
  bool hide_scope = false;
  bool marginals = false;
  std::string spn_digest;
  std::uint32_t num_rvs = 0;
  LeafFamily family = LeafFamily::Bernoulli;
  std::uint32_t num_leaves = 0;
  std::uint64_t selection_switches = 0;  // 0 without scope hiding
  std::uint32_t selection_width = 0;     // bits per routed word

  /// Throws DomainError unless the layouts tile the circuit's input groups
  /// and the output is a single word named "log2_prob".
  void check() const;
};

inline constexpr const char* kOutputName = "log2_prob";

/// Compiles a valid SPN. With `hide_scope` the leaves read their random
/// variables through one selection network programmed by the server; with
/// `marginals` the client supplies a known-flag per random variable and
/// leaves of unknown variables evaluate to 0.0.
CompiledSpn compile(const SpnGraph& spn, FloatFormat fmt, bool hide_scope = false, bool marginals = false);

/// Selection map: leaf i (topological order) reads rv phi[i].
std::vector<std::uint32_t> leaf_rv_map(const SpnGraph& spn);

/// Server bits: leaf constants, log2 sum weights and selection control bits.
/// Throws DomainError on digest mismatch or a Bernoulli p of 0 or 1.
BitVector derive_server_inputs(const SpnGraph& spn, const CompiledSpn& compiled);

/// Client bits: values, Poisson −log2(x!) companions and known-flags.
BitVector derive_client_inputs(const CompiledSpn& compiled, const Evidence& ev);

/// Interprets the circuit output bits as a float of the compiled precision.
double decode_output(const CompiledSpn& compiled, const BitVector& output_bits);

}  // namespace cryptospn
