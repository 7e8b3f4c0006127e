#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace cryptospn {

enum class LeafFamily : std::uint8_t { Gaussian, Poisson, Bernoulli };

const char* to_string(LeafFamily family);
/// Accepts the file-format tags "gauss", "pois", "bern".
LeafFamily leaf_family_from_tag(const std::string& tag);
const char* family_tag(LeafFamily family);

struct Gaussian {
  double mu = 0.0;
  double sigma2 = 1.0;
  friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

struct Poisson {
  double lambda = 1.0;
  friend bool operator==(const Poisson&, const Poisson&) = default;
};

struct Bernoulli {
  double p = 0.5;
  friend bool operator==(const Bernoulli&, const Bernoulli&) = default;
};

using LeafDist = std::variant<Gaussian, Poisson, Bernoulli>;

LeafFamily family_of(const LeafDist& dist);
/// Throws DomainError when a parameter is out of range.
void check_params(const LeafDist& dist);

enum class NodeType : std::uint8_t { Sum, Product, Leaf };

const char* to_string(NodeType type);

struct Node {
  NodeType type = NodeType::Leaf;
  std::vector<std::uint32_t> children;  // sum and product nodes
  std::vector<double> weights;          // sum nodes, one per child
  std::uint32_t rv = 0;                 // leaves
  LeafDist dist = Bernoulli{};          // leaves

  static Node sum(std::vector<std::uint32_t> children, std::vector<double> weights);
  static Node product(std::vector<std::uint32_t> children);
  static Node leaf(std::uint32_t rv, LeafDist dist);

  friend bool operator==(const Node&, const Node&) = default;
};

/// Immutable rooted DAG of sum, product and leaf nodes.
///
/// Construction checks structure (child indices, acyclicity, reachability,
/// leaf parameters, one leaf family, RV range) and renumbers the nodes into
/// depth-first post-order from the root, visiting children in list order, so
/// that children always precede parents and the root is the last node.
/// Semantic properties (weights, completeness, decomposability) are checked
/// by validate().
class SpnGraph {
 public:
  SpnGraph(std::uint32_t num_rvs, std::vector<Node> nodes, std::uint32_t root,
           nlohmann::json meta = nlohmann::json::object());

  std::uint32_t num_rvs() const { return num_rvs_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(std::uint32_t i) const { return nodes_.at(i); }
  std::size_t size() const { return nodes_.size(); }
  std::uint32_t root() const { return static_cast<std::uint32_t>(nodes_.size() - 1); }
  LeafFamily family() const { return family_; }
  const nlohmann::json& meta() const { return meta_; }

  std::size_t count(NodeType type) const;
  /// Leaf node indices in topological order.
  std::vector<std::uint32_t> leaves() const;
  /// Σ over sum nodes of their child counts.
  std::size_t sum_children() const;

  friend bool operator==(const SpnGraph& a, const SpnGraph& b) {
    return a.num_rvs_ == b.num_rvs_ && a.nodes_ == b.nodes_ && a.meta_ == b.meta_;
  }

 private:
  std::uint32_t num_rvs_;
  std::vector<Node> nodes_;
  LeafFamily family_;
  nlohmann::json meta_;
};

/// Per-RV optional observations; an empty entry marginalizes the RV out.
struct Evidence {
  std::vector<std::optional<double>> values;

  static Evidence missing(std::uint32_t num_rvs);
  std::size_t observed() const;
  /// Throws DomainError on length or type mismatch with the SPN's leaf family.
  void check(const SpnGraph& spn) const;
};

}  // namespace cryptospn
