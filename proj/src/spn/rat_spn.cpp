#include "cryptospn/spn/rat_spn.hpp"

#include <algorithm>
#include <string>

#include "cryptospn/errors.hpp"

namespace cryptospn {

std::uint64_t SplitMix64::next() {
  ++counter_;
  std::uint64_t z = seed_ + counter_ * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % n;
  }
}

double SplitMix64::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

void RatSpnConfig::check() const {
  if (split_depth < 1) throw DomainError("split depth must be at least 1");
  if (split_depth >= 32 || (std::uint64_t{1} << split_depth) > num_rvs) {
    throw DomainError("split depth " + std::to_string(split_depth) + " needs at least " +
                      std::to_string(split_depth >= 32 ? 0 : (1ULL << split_depth)) + " random variables, got " +
                      std::to_string(num_rvs));
  }
  if (num_replicas < 1) throw DomainError("replica count must be at least 1");
  if (sums_per_region < 1) throw DomainError("sums per region must be at least 1");
  if (leaves_per_rv < 1) throw DomainError("leaves per random variable must be at least 1");
}

namespace {

LeafDist default_leaf(LeafFamily family) {
  switch (family) {
    case LeafFamily::Gaussian: return Gaussian{0.0, 1.0};
    case LeafFamily::Poisson: return Poisson{1.0};
    case LeafFamily::Bernoulli: return Bernoulli{0.5};
  }
  return Bernoulli{0.5};
}

class Generator {
 public:
  explicit Generator(const RatSpnConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

  SpnGraph run() {
    std::vector<std::uint32_t> all(cfg_.num_rvs);
    for (std::uint32_t v = 0; v < cfg_.num_rvs; ++v) all[v] = v;
    std::vector<std::uint32_t> top;
    for (std::uint32_t r = 0; r < cfg_.num_replicas; ++r) {
      const auto part = region(all, cfg_.split_depth, true);
      top.insert(top.end(), part.begin(), part.end());
    }
    const std::uint32_t root = add(Node::sum(top, uniform(top.size())));
    nlohmann::json meta = {{"generator", "rat-spn"},
                           {"rng", "splitmix64"},
                           {"seed", cfg_.seed},
                           {"num_rvs", cfg_.num_rvs},
                           {"split_depth", cfg_.split_depth},
                           {"num_replicas", cfg_.num_replicas},
                           {"sums_per_region", cfg_.sums_per_region},
                           {"leaves_per_rv", cfg_.leaves_per_rv}};
    return SpnGraph(cfg_.num_rvs, std::move(nodes_), root, std::move(meta));
  }

 private:
  std::uint32_t add(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }

  static std::vector<double> uniform(std::size_t k) { return std::vector<double>(k, 1.0 / static_cast<double>(k)); }

  std::vector<std::uint32_t> region(std::vector<std::uint32_t> rvs, std::uint32_t depth, bool is_top) {
    if (depth == 0) {
      std::vector<std::vector<std::uint32_t>> leaves(rvs.size());
      for (std::size_t k = 0; k < rvs.size(); ++k) {
        for (std::uint32_t i = 0; i < cfg_.leaves_per_rv; ++i) leaves[k].push_back(add(Node::leaf(rvs[k], default_leaf(cfg_.family))));
      }
      if (rvs.size() == 1) return leaves[0];
      std::vector<std::uint32_t> out;
      for (std::uint32_t i = 0; i < cfg_.leaves_per_rv; ++i) {
        std::vector<std::uint32_t> children;
        for (const auto& l : leaves) children.push_back(l[i]);
        out.push_back(add(Node::product(std::move(children))));
      }
      return out;
    }
    // Uniform random 2-partition; an odd region puts the extra RV on a random side.
    for (std::size_t i = rvs.size(); i > 1; --i) std::swap(rvs[i - 1], rvs[rng_.below(i)]);
    std::size_t first = rvs.size() / 2;
    if (rvs.size() % 2 == 1 && rng_.below(2) == 1) ++first;
    std::vector<std::uint32_t> left(rvs.begin(), rvs.begin() + static_cast<std::ptrdiff_t>(first));
    std::vector<std::uint32_t> right(rvs.begin() + static_cast<std::ptrdiff_t>(first), rvs.end());
    std::sort(left.begin(), left.end());
    std::sort(right.begin(), right.end());
    const auto a = region(std::move(left), depth - 1, false);
    const auto b = region(std::move(right), depth - 1, false);
    std::vector<std::uint32_t> products;
    for (auto x : a) {
      for (auto y : b) products.push_back(add(Node::product({x, y})));
    }
    if (is_top) return products;
    std::vector<std::uint32_t> sums;
    for (std::uint32_t s = 0; s < cfg_.sums_per_region; ++s) sums.push_back(add(Node::sum(products, uniform(products.size()))));
    return sums;
  }

  const RatSpnConfig& cfg_;
  SplitMix64 rng_;
  std::vector<Node> nodes_;
};

}  // namespace

SpnGraph generate_rat_spn(const RatSpnConfig& cfg) {
  cfg.check();
  return Generator(cfg).run();
}

SpnGraph randomize_parameters(const SpnGraph& spn, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Node> nodes = spn.nodes();
  for (auto& n : nodes) {
    if (n.type == NodeType::Sum) {
      double total = 0.0;
      for (auto& w : n.weights) {
        w = rng.uniform(0.05, 1.0);
        total += w;
      }
      for (auto& w : n.weights) w /= total;
    } else if (n.type == NodeType::Leaf) {
      switch (spn.family()) {
        case LeafFamily::Gaussian: n.dist = Gaussian{rng.uniform(-2.0, 2.0), rng.uniform(0.25, 4.0)}; break;
        case LeafFamily::Poisson: n.dist = Poisson{rng.uniform(0.5, 8.0)}; break;
        case LeafFamily::Bernoulli: n.dist = Bernoulli{rng.uniform(0.05, 0.95)}; break;
      }
    }
  }
  nlohmann::json meta = spn.meta();
  meta["parameter_seed"] = seed;
  return SpnGraph(spn.num_rvs(), std::move(nodes), spn.root(), std::move(meta));
}

}  // namespace cryptospn
