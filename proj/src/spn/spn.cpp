#include "cryptospn/spn/spn.hpp"

#include <cmath>

#include "cryptospn/errors.hpp"

namespace cryptospn {

const char* to_string(LeafFamily family) {
  switch (family) {
    case LeafFamily::Gaussian: return "gaussian";
    case LeafFamily::Poisson: return "poisson";
    case LeafFamily::Bernoulli: return "bernoulli";
  }
  return "?";
}

const char* family_tag(LeafFamily family) {
  switch (family) {
    case LeafFamily::Gaussian: return "gauss";
    case LeafFamily::Poisson: return "pois";
    case LeafFamily::Bernoulli: return "bern";
  }
  return "?";
}

LeafFamily leaf_family_from_tag(const std::string& tag) {
  if (tag == "gauss") return LeafFamily::Gaussian;
  if (tag == "pois") return LeafFamily::Poisson;
  if (tag == "bern") return LeafFamily::Bernoulli;
  throw InputError("unknown leaf family '" + tag + "' (expected gauss, pois or bern)");
}

const char* to_string(NodeType type) {
  switch (type) {
    case NodeType::Sum: return "sum";
    case NodeType::Product: return "prod";
    case NodeType::Leaf: return "leaf";
  }
  return "?";
}

LeafFamily family_of(const LeafDist& dist) {
  if (std::holds_alternative<Gaussian>(dist)) return LeafFamily::Gaussian;
  if (std::holds_alternative<Poisson>(dist)) return LeafFamily::Poisson;
  return LeafFamily::Bernoulli;
}

void check_params(const LeafDist& dist) {
  if (const auto* g = std::get_if<Gaussian>(&dist)) {
    if (!std::isfinite(g->mu)) throw DomainError("gaussian mu must be finite");
    if (!(g->sigma2 > 0.0) || !std::isfinite(g->sigma2)) throw DomainError("gaussian sigma2 must be positive");
  } else if (const auto* p = std::get_if<Poisson>(&dist)) {
    if (!(p->lambda > 0.0) || !std::isfinite(p->lambda)) throw DomainError("poisson lambda must be positive");
  } else {
    const double v = std::get<Bernoulli>(dist).p;
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("bernoulli p must lie in [0, 1]");
  }
}

Node Node::sum(std::vector<std::uint32_t> children, std::vector<double> weights) {
  Node n;
  n.type = NodeType::Sum;
  n.children = std::move(children);
  n.weights = std::move(weights);
  return n;
}

Node Node::product(std::vector<std::uint32_t> children) {
  Node n;
  n.type = NodeType::Product;
  n.children = std::move(children);
  return n;
}

Node Node::leaf(std::uint32_t rv, LeafDist dist) {
  Node n;
  n.type = NodeType::Leaf;
  n.rv = rv;
  n.dist = dist;
  return n;
}

SpnGraph::SpnGraph(std::uint32_t num_rvs, std::vector<Node> nodes, std::uint32_t root, nlohmann::json meta)
    : num_rvs_(num_rvs), meta_(std::move(meta)) {
  if (nodes.empty()) throw DomainError("spn has no nodes");
  if (root >= nodes.size()) throw DomainError("root index " + std::to_string(root) + " out of range");
  if (num_rvs == 0) throw DomainError("spn needs at least one random variable");

  bool have_family = false;
  family_ = LeafFamily::Bernoulli;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    if (n.type == NodeType::Leaf) {
      if (n.rv >= num_rvs) throw DomainError("leaf " + std::to_string(i) + " uses rv " + std::to_string(n.rv) + " >= num_rvs");
      check_params(n.dist);
      const LeafFamily f = family_of(n.dist);
      if (have_family && f != family_) throw DomainError("mixed leaf families are not supported");
      family_ = f;
      have_family = true;
    } else {
      for (auto c : n.children) {
        if (c >= nodes.size()) throw DomainError("node " + std::to_string(i) + " has dangling child " + std::to_string(c));
      }
    }
  }
  if (!have_family) throw DomainError("spn has no leaves");

  // Iterative DFS post-order with cycle detection.
  enum : std::uint8_t { kNew, kActive, kDone };
  std::vector<std::uint8_t> state(nodes.size(), kNew);
  std::vector<std::uint32_t> order_of(nodes.size(), 0);
  std::vector<std::uint32_t> order;
  order.reserve(nodes.size());
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{root, 0}};
  state[root] = kActive;
  while (!stack.empty()) {
    auto& [id, next] = stack.back();
    const Node& n = nodes[id];
    if (next < n.children.size()) {
      const std::uint32_t c = n.children[next++];
      if (state[c] == kActive) throw DomainError("spn contains a cycle through node " + std::to_string(c));
      if (state[c] == kNew) {
        state[c] = kActive;
        stack.emplace_back(c, 0);
      }
      continue;
    }
    state[id] = kDone;
    order_of[id] = static_cast<std::uint32_t>(order.size());
    order.push_back(id);
    stack.pop_back();
  }
  if (order.size() != nodes.size()) throw DomainError("spn has nodes unreachable from the root");

  nodes_.reserve(nodes.size());
  for (auto id : order) {
    Node n = std::move(nodes[id]);
    for (auto& c : n.children) c = order_of[c];
    nodes_.push_back(std::move(n));
  }
}

std::size_t SpnGraph::count(NodeType type) const {
  std::size_t k = 0;
  for (const auto& n : nodes_) k += n.type == type;
  return k;
}

std::vector<std::uint32_t> SpnGraph::leaves() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].type == NodeType::Leaf) out.push_back(i);
  }
  return out;
}

std::size_t SpnGraph::sum_children() const {
  std::size_t k = 0;
  for (const auto& n : nodes_) {
    if (n.type == NodeType::Sum) k += n.children.size();
  }
  return k;
}

Evidence Evidence::missing(std::uint32_t num_rvs) {
  Evidence e;
  e.values.assign(num_rvs, std::nullopt);
  return e;
}

std::size_t Evidence::observed() const {
  std::size_t k = 0;
  for (const auto& v : values) k += v.has_value();
  return k;
}

void Evidence::check(const SpnGraph& spn) const {
  if (values.size() != spn.num_rvs()) {
    throw DomainError("evidence has " + std::to_string(values.size()) + " entries, spn has " +
                      std::to_string(spn.num_rvs()) + " random variables");
  }
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!values[j]) continue;
    const double v = *values[j];
    const std::string where = "evidence entry " + std::to_string(j);
    if (!std::isfinite(v)) throw DomainError(where + " is not finite");
    switch (spn.family()) {
      case LeafFamily::Gaussian: break;
      case LeafFamily::Poisson:
        if (v < 0 || std::floor(v) != v) throw DomainError(where + " must be a non-negative integer");
        break;
      case LeafFamily::Bernoulli:
        if (v != 0.0 && v != 1.0) throw DomainError(where + " must be 0 or 1");
        break;
    }
  }
}

}  // namespace cryptospn
