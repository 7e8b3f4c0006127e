#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "cryptospn/spn/spn.hpp"

namespace cryptospn {

/// The two per-leaf server constants of the log2-domain leaf formulas:
///  - Gaussian: a = −½·log2(2πσ²), b = log2(e)/(2σ²); value a − (x−μ)²·b
///  - Poisson:  a = log2(λ),       b = −λ·log2(e);    value (x·a + c) + b, c = −log2(x!)
///  - Bernoulli: a = log2(p),      b = log2(1−p);      value x ? a : b
struct LeafCoefficients {
  double a = 0.0;
  double b = 0.0;
};

LeafCoefficients leaf_coefficients(const LeafDist& dist);
/// −log2(x!) for a non-negative integer x.
double neg_log2_factorial(double x);
/// log2 density / mass of one observed value, with the evaluation order above.
double leaf_log2(const LeafDist& dist, double x);

/// Balanced binary reduction in list order: the left subtree takes the first
/// ⌈k/2⌉ items.
template <typename T, typename Op>
T tree_reduce(const std::vector<T>& items, Op&& op) {
  struct Rec {
    const std::vector<T>& v;
    Op& f;
    T run(std::size_t lo, std::size_t hi) {
      if (hi - lo == 1) return v[lo];
      const std::size_t mid = lo + (hi - lo + 1) / 2;
      T left = run(lo, mid);
      T right = run(mid, hi);
      return f(std::move(left), std::move(right));
    }
  };
  Rec r{items, op};
  return r.run(0, items.size());
}

/// log2 P(evidence), bottom-up in the log2 domain. Sum nodes evaluate
/// log2(Σ 2^(child + log2 w)) as per-child add, exp2, balanced addition tree
/// and log2, in the same order as the compiled circuit.
double log_likelihood(const SpnGraph& spn, const Evidence& ev);
/// Values of every node.
std::vector<double> node_log_values(const SpnGraph& spn, const Evidence& ev);

/// log2 P(target | given). Observed RV sets must be disjoint.
double conditional_log_likelihood(const SpnGraph& spn, const Evidence& target, const Evidence& given);

}  // namespace cryptospn
