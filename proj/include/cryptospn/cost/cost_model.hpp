#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cryptospn/circuit/circuit.hpp"
#include "cryptospn/gc/session.hpp"
#include "cryptospn/spn/spn.hpp"
#include "json.hpp"

namespace cryptospn {

enum class ConstantsSource : std::uint8_t { Paper, Measured };
const char* to_string(ConstantsSource source);

/// AND gates per float operation.
struct CostConstants {
  ConstantsSource source = ConstantsSource::Measured;
  FloatFormat precision;
  std::uint64_t add = 0;
  std::uint64_t mul = 0;
  std::uint64_t exp2 = 0;
  std::uint64_t log2 = 0;
  std::uint64_t mux = 0;

  /// Gaussian 2·ADD + 2·MUL, Poisson 2·ADD + MUL, Bernoulli one b-bit MUX.
  std::uint64_t leaf(LeafFamily family) const;

  /// Published binary32 counts 1820 / 3016 / 9740 / 10568 (ADD / MUL / EXP2 /
  /// LOG2); no binary64 counts exist, so binary64 raises DomainError.
  static CostConstants paper(FloatFormat fmt);
  /// Counts of this library's blocks.
  static CostConstants measured(FloatFormat fmt);
};

struct CostLine {
  std::string name;
  std::uint64_t value = 0;
};

/// Predicted costs. Every breakdown sums to its total.
struct CostReport {
  ConstantsSource source = ConstantsSource::Measured;
  int precision = 32;
  std::uint32_t kappa = 128;
  bool hide_scope = false;
  bool marginals = false;
  std::string spn_digest;

  std::uint32_t num_rvs = 0;
  std::uint64_t num_leaves = 0;
  std::uint64_t num_sums = 0;
  std::uint64_t num_products = 0;
  std::uint64_t sum_children = 0;
  std::uint64_t selection_switches = 0;

  std::uint64_t and_gates = 0;
  std::vector<CostLine> and_breakdown;  // leaves, sums, products, selection, marginal muxes
  std::uint64_t client_input_bits = 0;
  std::uint64_t server_input_bits = 0;
  std::vector<CostLine> input_breakdown;

  bool has_communication = false;
  std::uint64_t setup_bits = 0;
  std::vector<CostLine> setup_breakdown;
  std::uint64_t online_bits = 0;
  std::vector<CostLine> online_breakdown;

  nlohmann::json to_json() const;
  std::string to_table() const;
};

/// C^SPN = m·C^D + Σ_sums (C_LOG2 + (ch−1)·C_ADD + ch·(C_ADD + C_EXP2))
///       + Σ_prods (ch−1)·C_ADD, plus selection switches and m·b marginal
/// MUX gates. Measured constants reproduce compile() exactly.
CostReport predict_gates(const SpnGraph& spn, FloatFormat fmt, const CostConstants& constants, bool hide_scope = false,
                         bool marginals = false);

/// Adds setup κ·(IC + 2·C^SPN) and online κ·(2·IC + IS + b·Σch) + IC, in bits
/// of payload. With published constants and scope hiding the published selection
/// terms are added; with measured constants the selection network enters
/// through C^SPN, IC and the server's control bits.
CostReport predict_communication(const SpnGraph& spn, FloatFormat fmt, const CostConstants& constants,
                                 std::uint32_t kappa = 128, bool hide_scope = false, bool marginals = false);

struct ReconcileRow {
  std::string phase;
  std::string item;
  std::uint64_t predicted_bits = 0;
  std::uint64_t measured_bits = 0;
};

struct Reconciliation {
  std::vector<ReconcileRow> rows;
  std::uint64_t setup_predicted_bits = 0;
  std::uint64_t setup_measured_bits = 0;  // all setup payload
  std::uint64_t online_predicted_bits = 0;
  std::uint64_t online_measured_bits = 0;  // all online payload
  std::uint64_t ot_padding_bits = 0;
  std::uint64_t framing_bytes = 0;
  std::uint64_t control_bytes = 0;

  double setup_relative_delta() const;
  double online_relative_delta() const;
  nlohmann::json to_json() const;
  std::string to_table() const;
};

/// Predicted-vs-measured payload per phase. Throws DomainError when the
/// report and the session refer to different SPNs or precisions.
Reconciliation reconcile(const CostReport& report, const SessionReport& session);

}  // namespace cryptospn
