#pragma once

#include <cstdint>

#include "cryptospn/spn/spn.hpp"

namespace cryptospn {

/// Counter-based SplitMix64: output i is mix(seed + (i+1)·γ).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next();
  /// Uniform integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);
  /// Uniform double in [0, 1).
  double unit();
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

struct RatSpnConfig {
  std::uint32_t num_rvs = 2;
  std::uint32_t split_depth = 1;
  std::uint32_t num_replicas = 1;
  std::uint32_t sums_per_region = 1;
  std::uint32_t leaves_per_rv = 2;
  std::uint64_t seed = 0;
  LeafFamily family = LeafFamily::Bernoulli;

  /// Throws DomainError unless split_depth >= 1, 2^split_depth <= num_rvs and
  /// the replica, sum and leaf counts are positive.
  void check() const;
};

/// Random region-graph SPN with default parameters: uniform sum weights and
/// N(0, 1), Poisson(1) or Bernoulli(0.5) leaves.
SpnGraph generate_rat_spn(const RatSpnConfig& cfg);

/// Same structure with randomly drawn weights and leaf parameters.
SpnGraph randomize_parameters(const SpnGraph& spn, std::uint64_t seed);

}  // namespace cryptospn
