#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cryptospn/spn/json_io.hpp"
#include "cryptospn/spn/rat_spn.hpp"

namespace cryptospn::testing {

std::filesystem::path data_dir() { return CRYPTOSPN_TEST_DATA; }

SpnGraph mixture_spn() { return load_spn(data_dir() / "mixture_bernoulli.json"); }

namespace {

class RandomBuilder {
 public:
  RandomBuilder(Rng& rng, const RandomSpnOptions& opt) : rng_(rng), opt_(opt) {}

  SpnGraph run() {
    std::uniform_int_distribution<std::uint32_t> nd(opt_.min_rvs, opt_.max_rvs);
    const std::uint32_t n = nd(rng_);
    std::vector<std::uint32_t> scope(n);
    for (std::uint32_t i = 0; i < n; ++i) scope[i] = i;
    const std::uint32_t root = build(scope, opt_.max_depth);
    return SpnGraph(n, std::move(nodes_), root);
  }

 private:
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::uint32_t pick(std::uint32_t lo, std::uint32_t hi) { return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng_); }

  std::uint32_t push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }

  LeafDist dist() {
    switch (opt_.family) {
      case LeafFamily::Gaussian: return Gaussian{uniform(-1.5, 1.5), uniform(0.5, 3.0)};
      case LeafFamily::Poisson: return Poisson{uniform(0.5, 5.0)};
      case LeafFamily::Bernoulli: return Bernoulli{uniform(0.05, 0.95)};
    }
    return Bernoulli{};
  }

  std::uint32_t leaf(std::uint32_t rv) { return push(Node::leaf(rv, dist())); }

  std::uint32_t factorized(const std::vector<std::uint32_t>& scope) {
    if (scope.size() == 1) return leaf(scope[0]);
    std::vector<std::uint32_t> children;
    for (auto rv : scope) children.push_back(leaf(rv));
    return push(Node::product(std::move(children)));
  }

  std::uint32_t sum(const std::vector<std::uint32_t>& scope, std::uint32_t depth) {
    const std::uint32_t k = pick(2, 3);
    std::vector<std::uint32_t> children;
    std::vector<double> weights;
    double total = 0.0;
    for (std::uint32_t i = 0; i < k; ++i) {
      children.push_back(build(scope, depth - 1));
      weights.push_back(uniform(0.1, 1.0));
      total += weights.back();
    }
    for (auto& w : weights) w /= total;
    return push(Node::sum(std::move(children), std::move(weights)));
  }

  std::uint32_t build(std::vector<std::uint32_t> scope, std::uint32_t depth) {
    if (depth == 0 || nodes_.size() + 4 * scope.size() > opt_.max_nodes) return factorized(scope);
    if (scope.size() == 1) return pick(0, 1) == 0 ? leaf(scope[0]) : sum(scope, depth);
    if (pick(0, 9) < 4) return sum(scope, depth);
    std::shuffle(scope.begin(), scope.end(), rng_);
    const auto parts = pick(2, std::min<std::uint32_t>(3, static_cast<std::uint32_t>(scope.size())));
    std::vector<std::vector<std::uint32_t>> split(parts);
    for (std::size_t i = 0; i < scope.size(); ++i) split[i < parts ? i : pick(0, parts - 1)].push_back(scope[i]);
    std::vector<std::uint32_t> children;
    for (auto& s : split) {
      std::sort(s.begin(), s.end());
      children.push_back(build(s, depth - 1));
    }
    return push(Node::product(std::move(children)));
  }

  Rng& rng_;
  const RandomSpnOptions& opt_;
  std::vector<Node> nodes_;
};

}  // namespace

SpnGraph random_spn(Rng& rng, const RandomSpnOptions& opt) { return RandomBuilder(rng, opt).run(); }

Evidence random_evidence(Rng& rng, const SpnGraph& spn, double missing_rate) {
  Evidence ev;
  std::bernoulli_distribution missing(missing_rate);
  for (std::uint32_t j = 0; j < spn.num_rvs(); ++j) {
    if (missing_rate > 0.0 && missing(rng)) {
      ev.values.emplace_back();
      continue;
    }
    switch (spn.family()) {
      case LeafFamily::Gaussian: ev.values.emplace_back(std::uniform_real_distribution<double>(-2.0, 2.0)(rng)); break;
      case LeafFamily::Poisson: ev.values.emplace_back(static_cast<double>(std::uniform_int_distribution<int>(0, 6)(rng))); break;
      case LeafFamily::Bernoulli: ev.values.emplace_back(static_cast<double>(std::uniform_int_distribution<int>(0, 1)(rng))); break;
    }
  }
  return ev;
}

double linear_probability(const SpnGraph& spn, const Evidence& ev) {
  std::vector<double> v(spn.size());
  for (std::uint32_t i = 0; i < spn.size(); ++i) {
    const Node& n = spn.node(i);
    if (n.type == NodeType::Leaf) {
      const auto& x = ev.values.at(n.rv);
      if (!x) {
        v[i] = 1.0;
      } else if (const auto* g = std::get_if<Gaussian>(&n.dist)) {
        const double d = *x - g->mu;
        v[i] = std::exp(-d * d / (2.0 * g->sigma2)) / std::sqrt(2.0 * std::numbers::pi * g->sigma2);
      } else if (const auto* p = std::get_if<Poisson>(&n.dist)) {
        v[i] = std::exp(*x * std::log(p->lambda) - p->lambda - std::lgamma(*x + 1.0));
      } else {
        const double p1 = std::get<Bernoulli>(n.dist).p;
        v[i] = *x == 1.0 ? p1 : 1.0 - p1;
      }
    } else if (n.type == NodeType::Product) {
      v[i] = 1.0;
      for (auto c : n.children) v[i] *= v[c];
    } else {
      v[i] = 0.0;
      for (std::size_t k = 0; k < n.children.size(); ++k) v[i] += n.weights[k] * v[n.children[k]];
    }
  }
  return v[spn.root()];
}

std::uint64_t formula_and_count(const SpnGraph& spn, int bits, std::uint64_t add, std::uint64_t mul,
                                std::uint64_t exp2, std::uint64_t log2, std::uint64_t mux) {
  std::uint64_t leaf = 0;
  switch (spn.family()) {
    case LeafFamily::Gaussian: leaf = 2 * add + 2 * mul; break;
    case LeafFamily::Poisson: leaf = 2 * add + mul; break;
    case LeafFamily::Bernoulli: leaf = mux; break;
  }
  (void)bits;
  std::uint64_t total = 0;
  for (const Node& n : spn.nodes()) {
    const std::uint64_t ch = n.children.size();
    if (n.type == NodeType::Leaf) total += leaf;
    if (n.type == NodeType::Product) total += (ch - 1) * add;
    if (n.type == NodeType::Sum) total += log2 + (ch - 1) * add + ch * (add + exp2);
  }
  return total;
}

std::vector<NamedSpn> corpus() {
  std::vector<NamedSpn> out;
  out.push_back({"mixture", mixture_spn()});
  const LeafFamily families[] = {LeafFamily::Bernoulli, LeafFamily::Gaussian, LeafFamily::Poisson};
  for (auto fam : families) {
    const std::string tag = family_tag(fam);
    RatSpnConfig small{2, 1, 1, 1, 2, 7, fam};
    out.push_back({"rat-small-" + tag, randomize_parameters(generate_rat_spn(small), 11)});
    RatSpnConfig mid{8, 2, 1, 2, 3, 5, fam};
    out.push_back({"rat-mid-" + tag, randomize_parameters(generate_rat_spn(mid), 12)});
  }
  RatSpnConfig big{16, 3, 2, 2, 5, 1, LeafFamily::Bernoulli};
  out.push_back({"rat-16-bern", randomize_parameters(generate_rat_spn(big), 13)});
  Rng rng(2024);
  for (auto fam : families) {
    for (int i = 0; i < 4; ++i) {
      RandomSpnOptions opt;
      opt.family = fam;
      opt.max_rvs = fam == LeafFamily::Bernoulli ? 8 : 4;
      opt.max_nodes = 80;
      out.push_back({"random-" + std::string(family_tag(fam)) + "-" + std::to_string(i), random_spn(rng, opt)});
    }
  }
  return out;
}

std::uint64_t ulp_distance(std::uint64_t a_bits, std::uint64_t b_bits, FloatFormat fmt) {
  const int w = fmt.bits();
  const std::uint64_t sign = std::uint64_t{1} << (w - 1);
  const auto ordered = [&](std::uint64_t x) -> std::int64_t {
    const auto mag = static_cast<std::int64_t>(x & (sign - 1));
    return (x & sign) ? -mag : mag;
  };
  const std::int64_t a = ordered(a_bits), b = ordered(b_bits);
  return a > b ? static_cast<std::uint64_t>(a - b) : static_cast<std::uint64_t>(b - a);
}

BitVector random_bits(Rng& rng, std::size_t n) {
  BitVector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (rng() & 1) != 0;
  return out;
}

std::vector<BitVector> simulate_batch(const Circuit& circuit, const std::vector<BitVector>& client,
                                      const std::vector<BitVector>& server) {
  const std::size_t n = client.size();
  const std::size_t ic = circuit.party_input_bits(Party::Client), is = circuit.party_input_bits(Party::Server);
  std::vector<BitVector> out(n);
  for (std::size_t base = 0; base < n; base += 64) {
    const std::size_t lanes = std::min<std::size_t>(64, n - base);
    std::vector<std::uint64_t> cl(ic, 0), sl(is, 0);
    for (std::size_t l = 0; l < lanes; ++l) {
      for (std::size_t i = 0; i < ic; ++i) cl[i] |= std::uint64_t{client[base + l][i]} << l;
      for (std::size_t i = 0; i < is; ++i) sl[i] |= std::uint64_t{server[base + l][i]} << l;
    }
    const auto res = simulate_lanes(circuit, cl, sl);
    for (std::size_t l = 0; l < lanes; ++l) {
      BitVector& o = out[base + l];
      o.resize(res.size());
      for (std::size_t i = 0; i < res.size(); ++i) o[i] = ((res[i] >> l) & 1) != 0;
    }
  }
  return out;
}

}  // namespace cryptospn::testing
