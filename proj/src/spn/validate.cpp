#include "cryptospn/spn/validate.hpp"

#include <cmath>
#include <sstream>

namespace cryptospn {
namespace {

using Bits = std::vector<std::uint64_t>;

bool intersects(const Bits& a, const Bits& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] & b[i]) return true;
  }
  return false;
}

std::vector<Bits> scope_bits(const SpnGraph& spn) {
  const std::size_t words = (spn.num_rvs() + 63) / 64;
  std::vector<Bits> s(spn.size(), Bits(words, 0));
  for (std::uint32_t i = 0; i < spn.size(); ++i) {
    const Node& n = spn.node(i);
    if (n.type == NodeType::Leaf) {
      s[i][n.rv / 64] |= std::uint64_t{1} << (n.rv % 64);
      continue;
    }
    for (auto c : n.children) {
      for (std::size_t k = 0; k < words; ++k) s[i][k] |= s[c][k];
    }
  }
  return s;
}

}  // namespace

std::string ValidationReport::to_string() const {
  if (valid) return "valid";
  std::ostringstream os;
  os << violations.size() << " violation(s)";
  for (const auto& v : violations) os << "\n  node " << v.node << " [" << v.rule << "]: " << v.message;
  return os.str();
}

ValidationReport validate(const SpnGraph& spn) {
  ValidationReport r;
  auto fail = [&](std::uint32_t node, const char* rule, std::string msg) {
    r.valid = false;
    r.violations.push_back(Violation{node, rule, std::move(msg)});
  };
  const auto s = scope_bits(spn);
  for (std::uint32_t i = 0; i < spn.size(); ++i) {
    const Node& n = spn.node(i);
    if (n.type == NodeType::Leaf) continue;
    if (n.children.empty()) {
      fail(i, "arity", std::string(cryptospn::to_string(n.type)) + " node has no children");
      continue;
    }
    if (n.type == NodeType::Sum) {
      if (n.weights.size() != n.children.size()) {
        fail(i, "weights", "has " + std::to_string(n.weights.size()) + " weights for " +
                               std::to_string(n.children.size()) + " children");
      } else {
        double total = 0.0;
        bool ok = true;
        for (double w : n.weights) {
          if (!(w >= 0.0) || !std::isfinite(w)) ok = false;
          total += w;
        }
        if (!ok) {
          fail(i, "weights", "weights must be finite and non-negative");
        } else if (std::abs(total - 1.0) > kWeightTolerance) {
          std::ostringstream os;
          os.precision(17);
          os << "weights sum to " << total << ", expected 1";
          fail(i, "weights", os.str());
        }
      }
      for (std::size_t k = 1; k < n.children.size(); ++k) {
        if (s[n.children[k]] != s[n.children[0]]) {
          fail(i, "completeness", "child " + std::to_string(n.children[k]) + " has a different scope than child " +
                                      std::to_string(n.children[0]));
          break;
        }
      }
    } else {
      Bits seen(s[i].size(), 0);
      for (auto c : n.children) {
        if (intersects(seen, s[c])) {
          fail(i, "decomposability", "child " + std::to_string(c) + " shares random variables with a sibling");
          break;
        }
        for (std::size_t k = 0; k < seen.size(); ++k) seen[k] |= s[c][k];
      }
    }
  }
  return r;
}

ValidationError::ValidationError(ValidationReport report)
    : DomainError("invalid spn: " + report.to_string()), report_(std::move(report)) {}

void require_valid(const SpnGraph& spn) {
  auto r = validate(spn);
  if (!r.valid) throw ValidationError(std::move(r));
}

std::vector<std::vector<std::uint32_t>> scopes(const SpnGraph& spn) {
  const auto s = scope_bits(spn);
  std::vector<std::vector<std::uint32_t>> out(spn.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::uint32_t v = 0; v < spn.num_rvs(); ++v) {
      if ((s[i][v / 64] >> (v % 64)) & 1U) out[i].push_back(v);
    }
  }
  return out;
}

}  // namespace cryptospn
