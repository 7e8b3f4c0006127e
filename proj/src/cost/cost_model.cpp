#include "cryptospn/cost/cost_model.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "cryptospn/circuit/float_blocks.hpp"
#include "cryptospn/circuit/selection.hpp"
#include "cryptospn/errors.hpp"
#include "cryptospn/spn/json_io.hpp"
#include "cryptospn/spn/validate.hpp"

namespace cryptospn {
namespace {

std::uint64_t total(const std::vector<CostLine>& lines) {
  std::uint64_t t = 0;
  for (const auto& l : lines) t += l.value;
  return t;
}

std::uint64_t params_per_leaf(LeafFamily f) { return f == LeafFamily::Gaussian ? 3 : 2; }

std::uint64_t client_value_bits(LeafFamily f, std::uint64_t b) {
  switch (f) {
    case LeafFamily::Bernoulli: return 1;
    case LeafFamily::Gaussian: return b;
    case LeafFamily::Poisson: return 2 * b;
  }
  return 0;
}

nlohmann::json lines_json(const std::vector<CostLine>& lines) {
  auto j = nlohmann::json::object();
  for (const auto& l : lines) j[l.name] = l.value;
  return j;
}

void table_section(std::ostringstream& os, const std::string& title, std::uint64_t value,
                   const std::vector<CostLine>& lines) {
  os << "  " << std::left << std::setw(36) << title << std::right << std::setw(16) << value << "\n";
  for (const auto& l : lines) {
    os << "    " << std::left << std::setw(34) << l.name << std::right << std::setw(16) << l.value << "\n";
  }
}

double relative(std::uint64_t predicted, std::uint64_t measured) {
  if (predicted == 0) return measured == 0 ? 0.0 : INFINITY;
  return (static_cast<double>(measured) - static_cast<double>(predicted)) / static_cast<double>(predicted);
}

}  // namespace

const char* to_string(ConstantsSource source) { return source == ConstantsSource::Paper ? "paper" : "measured"; }

std::uint64_t CostConstants::leaf(LeafFamily family) const {
  switch (family) {
    case LeafFamily::Gaussian: return 2 * add + 2 * mul;
    case LeafFamily::Poisson: return 2 * add + mul;
    case LeafFamily::Bernoulli: return mux;
  }
  return 0;
}

CostConstants CostConstants::paper(FloatFormat fmt) {
  if (fmt.bits() != 32) throw DomainError("published gate counts exist only for binary32");
  return CostConstants{ConstantsSource::Paper, fmt, 1820, 3016, 9740, 10568, 32};
}

CostConstants CostConstants::measured(FloatFormat fmt) {
  const BlockCosts& k = measured_block_costs(fmt);
  return CostConstants{ConstantsSource::Measured, fmt, k.add, k.mul, k.exp2, k.log2, k.mux};
}

CostReport predict_gates(const SpnGraph& spn, FloatFormat fmt, const CostConstants& k, bool hide_scope,
                         bool marginals) {
  require_valid(spn);
  if (k.precision != fmt) throw DomainError("cost constants were taken for a different precision");
  CostReport r;
  r.source = k.source;
  r.precision = fmt.bits();
  r.hide_scope = hide_scope;
  r.marginals = marginals;
  r.spn_digest = spn_digest(spn);
  r.num_rvs = spn.num_rvs();
  r.num_leaves = spn.count(NodeType::Leaf);
  r.num_sums = spn.count(NodeType::Sum);
  r.num_products = spn.count(NodeType::Product);
  r.sum_children = spn.sum_children();

  const std::uint64_t b = fmt.bits();
  const std::uint64_t n = r.num_rvs, m = r.num_leaves;
  const LeafFamily fam = spn.family();
  if (hide_scope && m < n) throw DomainError("scope hiding needs at least as many leaves as random variables");

  std::uint64_t sums = 0, prods = 0;
  for (const auto& nd : spn.nodes()) {
    const std::uint64_t ch = nd.children.size();
    if (nd.type == NodeType::Sum) sums += k.log2 + (ch - 1) * k.add + ch * (k.add + k.exp2);
    if (nd.type == NodeType::Product) prods += (ch - 1) * k.add;
  }
  std::uint64_t selection = 0;
  if (hide_scope) {
    if (k.source == ConstantsSource::Measured) {
      r.selection_switches = selection_switches(spn.num_rvs(), static_cast<std::uint32_t>(m));
      const std::uint64_t width = client_value_bits(fam, b) + (marginals ? 1 : 0);
      selection = width * r.selection_switches;
    } else {
      const std::uint32_t words = fam == LeafFamily::Poisson ? 2 * spn.num_rvs() : spn.num_rvs();
      r.selection_switches = static_cast<std::uint64_t>(std::ceil(c_sel(words, static_cast<std::uint32_t>(m))));
      selection = (fam == LeafFamily::Bernoulli ? 1 : b) * r.selection_switches;
    }
  }
  r.and_breakdown = {{"leaves", m * k.leaf(fam)},
                     {"sums", sums},
                     {"products", prods},
                     {"selection", selection},
                     {"marginal muxes", marginals ? m * b : 0}};
  r.and_gates = total(r.and_breakdown);

  std::uint64_t control = 0;
  if (hide_scope && k.source == ConstantsSource::Measured) control = r.selection_switches;
  r.input_breakdown = {{"client rv values", n * client_value_bits(fam, b)},
                       {"client known flags", marginals ? n : 0},
                       {"server leaf params", params_per_leaf(fam) * m * b},
                       {"server sum weights", b * r.sum_children},
                       {"server selection control", control}};
  r.client_input_bits = r.input_breakdown[0].value + r.input_breakdown[1].value;
  r.server_input_bits = r.input_breakdown[2].value + r.input_breakdown[3].value + r.input_breakdown[4].value;
  return r;
}

CostReport predict_communication(const SpnGraph& spn, FloatFormat fmt, const CostConstants& k, std::uint32_t kappa,
                                 bool hide_scope, bool marginals) {
  CostReport r = predict_gates(spn, fmt, k, hide_scope, marginals);
  r.kappa = kappa;
  r.has_communication = true;
  const std::uint64_t ic = r.client_input_bits;
  const std::uint64_t b = fmt.bits();
  const std::uint64_t n = r.num_rvs;
  const bool paper_selection = hide_scope && k.source == ConstantsSource::Paper;
  const std::uint64_t sel_ands = r.and_breakdown[3].value;
  const std::uint64_t c_spn = paper_selection ? r.and_gates - sel_ands : r.and_gates;

  r.setup_breakdown = {{"client OT setup", kappa * ic}, {"garbled tables", 2 * kappa * c_spn}};
  r.online_breakdown = {{"client OT online", 2 * kappa * ic + ic},
                        {"garbler labels: leaf params", kappa * r.input_breakdown[2].value},
                        {"garbler labels: sum weights", kappa * r.input_breakdown[3].value},
                        {"garbler labels: selection control", kappa * r.input_breakdown[4].value}};
  if (paper_selection) {
    std::uint64_t setup_sel = 0, online_sel = 0;
    switch (spn.family()) {
      case LeafFamily::Gaussian:
        setup_sel = kappa * b * (n + 2 * r.selection_switches);
        online_sel = n * b * (2 * kappa + 1);
        break;
      case LeafFamily::Poisson:
        setup_sel = kappa * b * (2 * n + 2 * r.selection_switches);
        online_sel = 2 * n * b * (2 * kappa + 1);
        break;
      case LeafFamily::Bernoulli:
        setup_sel = kappa * (n + 2 * r.selection_switches);
        online_sel = n * (kappa + 1);
        break;
    }
    r.setup_breakdown.push_back({"selection network", setup_sel});
    r.online_breakdown.push_back({"selection network", online_sel});
  }
  r.setup_bits = total(r.setup_breakdown);
  r.online_bits = total(r.online_breakdown);
  return r;
}

nlohmann::json CostReport::to_json() const {
  nlohmann::json j{{"constants", to_string(source)},
                   {"precision", precision},
                   {"hide_scope", hide_scope},
                   {"marginals", marginals},
                   {"spn_digest", spn_digest},
                   {"num_rvs", num_rvs},
                   {"num_leaves", num_leaves},
                   {"num_sums", num_sums},
                   {"num_products", num_products},
                   {"sum_children", sum_children},
                   {"selection_switches", selection_switches},
                   {"and_gates", and_gates},
                   {"and_breakdown", lines_json(and_breakdown)},
                   {"client_input_bits", client_input_bits},
                   {"server_input_bits", server_input_bits},
                   {"input_breakdown", lines_json(input_breakdown)}};
  if (has_communication) {
    j["kappa"] = kappa;
    j["setup_bits"] = setup_bits;
    j["setup_breakdown"] = lines_json(setup_breakdown);
    j["online_bits"] = online_bits;
    j["online_breakdown"] = lines_json(online_breakdown);
  }
  return j;
}

std::string CostReport::to_table() const {
  std::ostringstream os;
  os << "cost prediction (" << to_string(source) << " constants, b" << precision
     << (hide_scope ? ", scope hiding" : "") << (marginals ? ", marginals" : "") << ")\n";
  os << "  n=" << num_rvs << " m=" << num_leaves << " sums=" << num_sums << " products=" << num_products
     << " sum children=" << sum_children;
  if (hide_scope) os << " switches=" << selection_switches;
  os << "\n";
  table_section(os, "AND gates", and_gates, and_breakdown);
  table_section(os, "input bits", client_input_bits + server_input_bits, input_breakdown);
  if (has_communication) {
    table_section(os, "setup bits (kappa=" + std::to_string(kappa) + ")", setup_bits, setup_breakdown);
    table_section(os, "online bits", online_bits, online_breakdown);
  }
  return os.str();
}

Reconciliation reconcile(const CostReport& report, const SessionReport& s) {
  if (!report.has_communication) throw DomainError("reconciliation needs a communication prediction");
  if (report.spn_digest != s.spn_digest) throw DomainError("cost report and session refer to different SPNs");
  if (report.precision != s.precision) throw DomainError("cost report and session use different precisions");
  const auto& st = s.setup.traffic;
  const auto& on = s.online.traffic;
  Reconciliation r;
  r.ot_padding_bits = s.ot.setup_padding_bits + s.ot.online_padding_bits;
  const std::uint64_t labels_pred = report.online_breakdown[1].value + report.online_breakdown[2].value +
                                    report.online_breakdown[3].value;
  r.rows = {
      {"setup", "garbled tables", report.setup_breakdown[1].value, 8 * st.payload(MessageType::GcChunk)},
      {"setup", "OT extension matrix", report.setup_breakdown[0].value,
       8 * st.payload(MessageType::OtextSetup) - s.ot.setup_padding_bits},
      {"setup", "OT extension padding", 0, s.ot.setup_padding_bits},
      {"setup", "base OT", 0, 8 * st.payload(MessageType::BaseOtMsg)},
      {"online", "client OT", report.online_breakdown[0].value,
       8 * on.payload(MessageType::OtextOnline) - s.ot.online_padding_bits},
      {"online", "OT extension padding", 0, s.ot.online_padding_bits},
      {"online", "garbler labels", labels_pred, 8 * on.payload(MessageType::GarblerLabels)},
      {"online", "decode table", 0, 8 * on.payload(MessageType::DecodeTable)},
  };
  for (std::size_t i = 4; i < report.online_breakdown.size(); ++i) {
    r.rows.push_back({"online", report.online_breakdown[i].name, report.online_breakdown[i].value, 0});
  }
  for (std::size_t i = 2; i < report.setup_breakdown.size(); ++i) {
    r.rows.push_back({"setup", report.setup_breakdown[i].name, report.setup_breakdown[i].value, 0});
  }
  for (const auto& row : r.rows) {
    if (row.phase == "setup") {
      r.setup_predicted_bits += row.predicted_bits;
      r.setup_measured_bits += row.measured_bits;
    } else {
      r.online_predicted_bits += row.predicted_bits;
      r.online_measured_bits += row.measured_bits;
    }
  }
  r.framing_bytes = s.framing_bytes();
  r.control_bytes = s.control_bytes();
  return r;
}

double Reconciliation::setup_relative_delta() const { return relative(setup_predicted_bits, setup_measured_bits); }
double Reconciliation::online_relative_delta() const { return relative(online_predicted_bits, online_measured_bits); }

nlohmann::json Reconciliation::to_json() const {
  auto rows_json = nlohmann::json::array();
  for (const auto& row : rows) {
    rows_json.push_back({{"phase", row.phase},
                         {"item", row.item},
                         {"predicted_bits", row.predicted_bits},
                         {"measured_bits", row.measured_bits}});
  }
  return {{"rows", rows_json},
          {"setup", {{"predicted_bits", setup_predicted_bits},
                     {"measured_bits", setup_measured_bits},
                     {"relative_delta", setup_relative_delta()}}},
          {"online", {{"predicted_bits", online_predicted_bits},
                      {"measured_bits", online_measured_bits},
                      {"relative_delta", online_relative_delta()}}},
          {"ot_padding_bits", ot_padding_bits},
          {"framing_bytes", framing_bytes},
          {"control_bytes", control_bytes}};
}

std::string Reconciliation::to_table() const {
  std::ostringstream os;
  os << "  " << std::left << std::setw(8) << "phase" << std::setw(36) << "item" << std::right << std::setw(16)
     << "predicted bits" << std::setw(16) << "measured bits" << std::setw(14) << "delta bits" << "\n";
  auto line = [&](const std::string& phase, const std::string& item, std::uint64_t p, std::uint64_t m) {
    os << "  " << std::left << std::setw(8) << phase << std::setw(36) << item << std::right << std::setw(16) << p
       << std::setw(16) << m << std::setw(14) << (static_cast<long long>(m) - static_cast<long long>(p)) << "\n";
  };
  for (const auto& row : rows) line(row.phase, row.item, row.predicted_bits, row.measured_bits);
  line("setup", "total payload", setup_predicted_bits, setup_measured_bits);
  line("online", "total payload", online_predicted_bits, online_measured_bits);
  os << std::fixed << std::setprecision(4) << "  setup delta " << 100.0 * setup_relative_delta() << " %, online delta "
     << 100.0 * online_relative_delta() << " %\n";
  os << "  framing " << framing_bytes << " B and control messages " << control_bytes
     << " B are not part of the payload\n";
  return os.str();
}

}  // namespace cryptospn
