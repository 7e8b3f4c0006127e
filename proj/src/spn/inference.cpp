#include "cryptospn/spn/inference.hpp"

#include <cmath>
#include <numbers>

#include "cryptospn/errors.hpp"

namespace cryptospn {

LeafCoefficients leaf_coefficients(const LeafDist& dist) {
  constexpr double log2e = std::numbers::log2e;
  if (const auto* g = std::get_if<Gaussian>(&dist)) {
    return {-0.5 * std::log2(2.0 * std::numbers::pi * g->sigma2), log2e / (2.0 * g->sigma2)};
  }
  if (const auto* p = std::get_if<Poisson>(&dist)) return {std::log2(p->lambda), -p->lambda * log2e};
  const double p = std::get<Bernoulli>(dist).p;
  return {std::log2(p), std::log2(1.0 - p)};
}

double neg_log2_factorial(double x) { return -std::lgamma(x + 1.0) / std::numbers::ln2; }

double leaf_log2(const LeafDist& dist, double x) {
  const LeafCoefficients c = leaf_coefficients(dist);
  if (const auto* g = std::get_if<Gaussian>(&dist)) {
    const double d = x - g->mu;
    return c.a - (d * d) * c.b;
  }
  if (std::holds_alternative<Poisson>(dist)) return (x * c.a + neg_log2_factorial(x)) + c.b;
  return x != 0.0 ? c.a : c.b;
}

std::vector<double> node_log_values(const SpnGraph& spn, const Evidence& ev) {
  ev.check(spn);
  std::vector<double> val(spn.size());
  for (std::uint32_t i = 0; i < spn.size(); ++i) {
    const Node& n = spn.node(i);
    switch (n.type) {
      case NodeType::Leaf: {
        const auto& x = ev.values[n.rv];
        val[i] = x ? leaf_log2(n.dist, *x) : 0.0;
        break;
      }
      case NodeType::Product: {
        std::vector<double> xs;
        for (auto c : n.children) xs.push_back(val[c]);
        val[i] = tree_reduce(xs, [](double a, double b) { return a + b; });
        break;
      }
      case NodeType::Sum: {
        std::vector<double> xs;
        for (std::size_t k = 0; k < n.children.size(); ++k) {
          xs.push_back(std::exp2(val[n.children[k]] + std::log2(n.weights[k])));
        }
        val[i] = std::log2(tree_reduce(xs, [](double a, double b) { return a + b; }));
        break;
      }
    }
  }
  return val;
}

double log_likelihood(const SpnGraph& spn, const Evidence& ev) { return node_log_values(spn, ev).back(); }

double conditional_log_likelihood(const SpnGraph& spn, const Evidence& target, const Evidence& given) {
  target.check(spn);
  given.check(spn);
  Evidence joint = given;
  for (std::size_t j = 0; j < target.values.size(); ++j) {
    if (!target.values[j]) continue;
    if (given.values[j]) throw DomainError("rv " + std::to_string(j) + " is observed in both target and given");
    joint.values[j] = target.values[j];
  }
  return log_likelihood(spn, joint) - log_likelihood(spn, given);
}

}  // namespace cryptospn
