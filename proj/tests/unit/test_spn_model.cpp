#include <gtest/gtest.h>

#include <cmath>

#include "cryptospn/errors.hpp"
#include "cryptospn/spn/inference.hpp"
#include "cryptospn/spn/json_io.hpp"
#include "cryptospn/spn/rat_spn.hpp"
#include "cryptospn/spn/validate.hpp"
#include "support.hpp"

using namespace cryptospn;
namespace t = cryptospn::testing;

namespace {

Evidence ev_of(std::initializer_list<std::optional<double>> v) { return Evidence{std::vector<std::optional<double>>(v)}; }

SpnGraph mixture_038() {
  return SpnGraph(1, {Node::leaf(0, Bernoulli{0.8}), Node::leaf(0, Bernoulli{0.2}), Node::sum({0, 1}, {0.3, 0.7})}, 2);
}

SpnGraph independent_pair() {
  return SpnGraph(2, {Node::leaf(0, Bernoulli{0.8}), Node::leaf(1, Bernoulli{0.2}), Node::product({0, 1})}, 2);
}

struct RegionCounts {
  std::uint64_t sums = 0, products = 0, leaves = 0;
};

// Region-graph enumeration: a 2-partition of k variables always yields parts of
// size ceil(k/2) and floor(k/2), so the counts follow from the sizes alone.
std::uint64_t count_region(const RatSpnConfig& c, std::uint32_t k, std::uint32_t depth, bool top, RegionCounts& out) {
  if (depth == 0) {
    out.leaves += std::uint64_t{k} * c.leaves_per_rv;
    if (k > 1) out.products += c.leaves_per_rv;
    return c.leaves_per_rv;
  }
  const auto a = count_region(c, (k + 1) / 2, depth - 1, false, out);
  const auto b = count_region(c, k / 2, depth - 1, false, out);
  out.products += a * b;
  if (top) return a * b;
  out.sums += c.sums_per_region;
  return c.sums_per_region;
}

RegionCounts rat_oracle(const RatSpnConfig& c) {
  RegionCounts out;
  for (std::uint32_t r = 0; r < c.num_replicas; ++r) count_region(c, c.num_rvs, c.split_depth, true, out);
  out.sums += 1;
  return out;
}

}  // namespace

TEST(SpnParse, MixtureDocumentHasSevenNodes) {
  const SpnGraph spn = t::mixture_spn();
  EXPECT_EQ(spn.size(), 7u);
  EXPECT_EQ(spn.count(NodeType::Sum), 1u);
  EXPECT_EQ(spn.count(NodeType::Product), 2u);
  EXPECT_EQ(spn.count(NodeType::Leaf), 4u);
  EXPECT_EQ(spn.node(spn.root()).type, NodeType::Sum);
}

TEST(SpnParse, SingleLeafDocument) {
  const SpnGraph spn = parse_spn(
      R"({"num_rvs": 1, "leaf_family": "bern", "root": 0, "nodes": [{"id": 0, "type": "leaf", "rv": 0, "params": {"p": 0.3}}]})");
  EXPECT_EQ(spn.size(), 1u);
  EXPECT_EQ(spn.num_rvs(), 1u);
}

TEST(SpnParse, UnnormalizedWeightsRejected) {
  const std::string doc = R"({"num_rvs": 1, "leaf_family": "bern", "root": 2, "nodes": [
    {"id": 0, "type": "leaf", "rv": 0, "params": {"p": 0.3}},
    {"id": 1, "type": "leaf", "rv": 0, "params": {"p": 0.6}},
    {"id": 2, "type": "sum", "children": [0, 1], "weights": [0.5, 0.6]}]})";
  try {
    parse_spn(doc);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.report().violations.size(), 1u);
    EXPECT_EQ(e.report().violations[0].rule, "weights");
  }
}

TEST(SpnParse, SyntaxErrorReportsPosition) {
  try {
    parse_spn(R"({"num_rvs": 1,)");
    FAIL() << "expected a syntax error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos);
  }
}

TEST(SpnParse, DanglingChildRejected) {
  const std::string doc = R"({"num_rvs": 1, "leaf_family": "bern", "root": 1, "nodes": [
    {"id": 0, "type": "leaf", "rv": 0, "params": {"p": 0.3}},
    {"id": 1, "type": "prod", "children": [0, 9]}]})";
  EXPECT_THROW(parse_spn(doc), DomainError);
}

TEST(SpnParse, MixedFamiliesRejected) {
  EXPECT_THROW(SpnGraph(1, {Node::leaf(0, Bernoulli{0.5}), Node::leaf(0, Poisson{1.0}), Node::sum({0, 1}, {0.5, 0.5})}, 2),
               DomainError);
}

TEST(SpnParse, ParameterRangesChecked) {
  EXPECT_THROW(SpnGraph(1, {Node::leaf(0, Bernoulli{1.5})}, 0), DomainError);
  EXPECT_THROW(SpnGraph(1, {Node::leaf(0, Gaussian{0.0, 0.0})}, 0), DomainError);
  EXPECT_THROW(SpnGraph(1, {Node::leaf(0, Poisson{-1.0})}, 0), DomainError);
}

TEST(SpnParse, CycleRejected) {
  EXPECT_THROW(SpnGraph(1, {Node::leaf(0, Bernoulli{0.5}), Node::product({0, 2}), Node::product({1})}, 2), DomainError);
}

TEST(SpnParse, NodesRenumberedTopologically) {
  // Parent listed before its children.
  const SpnGraph spn(1, {Node::sum({1, 2}, {0.5, 0.5}), Node::leaf(0, Bernoulli{0.1}), Node::leaf(0, Bernoulli{0.9})}, 0);
  EXPECT_EQ(spn.root(), 2u);
  EXPECT_EQ(spn.node(2).children, (std::vector<std::uint32_t>{0, 1}));
  EXPECT_EQ(std::get<Bernoulli>(spn.node(0).dist).p, 0.1);
}

TEST(SpnValidate, OverlappingProductScopes) {
  const SpnGraph spn(1, {Node::leaf(0, Bernoulli{0.3}), Node::leaf(0, Bernoulli{0.6}), Node::product({0, 1})}, 2);
  const auto r = validate(spn);
  EXPECT_FALSE(r.valid);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].rule, "decomposability");
  EXPECT_EQ(r.violations[0].node, 2u);
}

TEST(SpnValidate, UnequalSumScopes) {
  const SpnGraph spn(2,
                     {Node::leaf(0, Bernoulli{0.3}), Node::leaf(0, Bernoulli{0.6}), Node::leaf(1, Bernoulli{0.6}),
                      Node::product({1, 2}), Node::sum({0, 3}, {0.5, 0.5})},
                     4);
  const auto r = validate(spn);
  EXPECT_FALSE(r.valid);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].rule, "completeness");
}

TEST(SpnValidate, MixtureValid) {
  const auto r = validate(t::mixture_spn());
  EXPECT_TRUE(r.valid);
  EXPECT_TRUE(r.violations.empty());
}

TEST(SpnValidate, NegativeWeightReported) {
  const SpnGraph spn(1, {Node::leaf(0, Bernoulli{0.3}), Node::leaf(0, Bernoulli{0.6}), Node::sum({0, 1}, {1.5, -0.5})}, 2);
  const auto r = validate(spn);
  EXPECT_FALSE(r.valid);
  EXPECT_EQ(r.violations[0].rule, "weights");
}

TEST(SpnInference, BernoulliLeaf) {
  const SpnGraph spn(1, {Node::leaf(0, Bernoulli{0.8})}, 0);
  EXPECT_NEAR(log_likelihood(spn, ev_of({1.0})), -0.3219281, 1e-7);
}

TEST(SpnInference, AllMissingIsZero) {
  for (const auto& [name, spn] : t::corpus()) {
    EXPECT_NEAR(log_likelihood(spn, Evidence::missing(spn.num_rvs())), 0.0, 1e-12) << name;
  }
}

TEST(SpnInference, MixtureValue) {
  EXPECT_NEAR(log_likelihood(mixture_038(), ev_of({1.0})), -1.3959287, 1e-7);
}

TEST(SpnInference, MixtureAllOnes) {
  const SpnGraph spn = t::mixture_spn();
  const Evidence ev = load_evidence(t::data_dir() / "mixture_all_ones.json");
  EXPECT_NEAR(log_likelihood(spn, ev), std::log2(0.2), 1e-12);
}

TEST(SpnInference, EvidenceMismatchRejected) {
  const SpnGraph spn = independent_pair();
  EXPECT_THROW(log_likelihood(spn, ev_of({1.0})), DomainError);
  EXPECT_THROW(log_likelihood(spn, ev_of({1.0, 0.5})), DomainError);
  const SpnGraph pois(1, {Node::leaf(0, Poisson{2.0})}, 0);
  EXPECT_THROW(log_likelihood(pois, ev_of({1.5})), DomainError);
  EXPECT_THROW(log_likelihood(pois, ev_of({-1.0})), DomainError);
}

TEST(SpnInference, ConditionalQueries) {
  const SpnGraph pair = independent_pair();
  EXPECT_NEAR(conditional_log_likelihood(pair, ev_of({1.0, std::nullopt}), ev_of({std::nullopt, 0.0})), -0.3219281, 1e-7);
  EXPECT_DOUBLE_EQ(conditional_log_likelihood(pair, ev_of({1.0, 1.0}), Evidence::missing(2)),
                   log_likelihood(pair, ev_of({1.0, 1.0})));
  EXPECT_NEAR(conditional_log_likelihood(pair, Evidence::missing(2), ev_of({1.0, 0.0})), 0.0, 1e-12);
  EXPECT_THROW(conditional_log_likelihood(pair, ev_of({1.0, std::nullopt}), ev_of({1.0, std::nullopt})), DomainError);
}

TEST(SpnInference, LeafFormulasMatchDensities) {
  EXPECT_NEAR(leaf_log2(Gaussian{0.5, 2.0}, 1.25), std::log2(std::exp(-0.5625 / 4.0) / std::sqrt(4.0 * M_PI)), 1e-12);
  EXPECT_NEAR(leaf_log2(Poisson{3.0}, 4.0), std::log2(std::pow(3.0, 4) * std::exp(-3.0) / 24.0), 1e-12);
  EXPECT_NEAR(neg_log2_factorial(5.0), -std::log2(120.0), 1e-12);
  EXPECT_EQ(neg_log2_factorial(0.0), 0.0);
}

TEST(SpnInference, MatchesLinearDomainOnCorpus) {
  t::Rng rng(5);
  for (const auto& [name, spn] : t::corpus()) {
    for (int k = 0; k < 5; ++k) {
      const Evidence ev = t::random_evidence(rng, spn, 0.2);
      const double p = t::linear_probability(spn, ev);
      EXPECT_NEAR(std::exp2(log_likelihood(spn, ev)), p, 1e-9 * std::max(1.0, p)) << name;
    }
  }
}

TEST(SpnInference, ProductIsSumOfChildren) {
  t::Rng rng(6);
  const SpnGraph spn = t::corpus()[3].spn;
  const Evidence ev = t::random_evidence(rng, spn);
  const auto v = node_log_values(spn, ev);
  for (std::uint32_t i = 0; i < spn.size(); ++i) {
    const Node& n = spn.node(i);
    if (n.type != NodeType::Product) continue;
    double s = 0.0;
    for (auto c : n.children) s += v[c];
    EXPECT_EQ(v[i], s);
  }
}

TEST(SpnProperties, BernoulliNormalizationAndMarginalization) {
  t::Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    t::RandomSpnOptions opt;
    opt.max_rvs = 8;
    const SpnGraph spn = t::random_spn(rng, opt);
    ASSERT_TRUE(validate(spn).valid);
    const std::uint32_t n = spn.num_rvs();
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      Evidence ev;
      for (std::uint32_t j = 0; j < n; ++j) ev.values.emplace_back(static_cast<double>((mask >> j) & 1));
      total += std::exp2(log_likelihood(spn, ev));
    }
    EXPECT_NEAR(total, 1.0, 1e-9);

    Evidence ev = t::random_evidence(rng, spn);
    const std::uint32_t j = static_cast<std::uint32_t>(rng() % n);
    double split = 0.0;
    for (double v : {0.0, 1.0}) {
      ev.values[j] = v;
      split += std::exp2(log_likelihood(spn, ev));
    }
    ev.values[j].reset();
    EXPECT_NEAR(std::exp2(log_likelihood(spn, ev)), split, 1e-9);
  }
}

TEST(RatSpn, SmallConfigCounts) {
  const RatSpnConfig cfg{2, 1, 1, 1, 2, 7};
  const SpnGraph spn = generate_rat_spn(cfg);
  EXPECT_EQ(spn.count(NodeType::Sum), 1u);
  EXPECT_EQ(spn.count(NodeType::Product), 4u);
  EXPECT_EQ(spn.count(NodeType::Leaf), 4u);
}

TEST(RatSpn, CountsMatchRegionGraphOracle) {
  const RatSpnConfig cfgs[] = {{2, 1, 1, 1, 2, 7}, {16, 3, 2, 2, 5, 1}, {16, 1, 2, 1, 20, 0},
                               {7, 2, 3, 2, 2, 9}, {5, 2, 1, 3, 1, 4},  {12, 3, 1, 1, 2, 8}};
  for (const auto& cfg : cfgs) {
    const SpnGraph spn = generate_rat_spn(cfg);
    const RegionCounts want = rat_oracle(cfg);
    EXPECT_EQ(spn.count(NodeType::Sum), want.sums) << cfg.num_rvs << "/" << cfg.split_depth;
    EXPECT_EQ(spn.count(NodeType::Product), want.products) << cfg.num_rvs << "/" << cfg.split_depth;
    EXPECT_EQ(spn.count(NodeType::Leaf), want.leaves) << cfg.num_rvs << "/" << cfg.split_depth;
    EXPECT_TRUE(validate(spn).valid);
  }
  const SpnGraph big = generate_rat_spn({16, 3, 2, 2, 5, 1});
  EXPECT_EQ(big.count(NodeType::Sum), 25u);
  EXPECT_EQ(big.count(NodeType::Product), 304u);
  EXPECT_EQ(big.count(NodeType::Leaf), 160u);
}

TEST(RatSpn, DeterministicAndGolden) {
  const RatSpnConfig cfg{16, 3, 2, 2, 5, 1};
  EXPECT_EQ(serialize_spn(generate_rat_spn(cfg)), serialize_spn(generate_rat_spn(cfg)));
  EXPECT_EQ(spn_digest(generate_rat_spn(cfg)), "a36e5b7185dd532328eb044e0fc653dff8d991d8fa0961fad2d8bb17fda32a12");
}

TEST(RatSpn, RandomConfigsCompleteAndDecomposable) {
  t::Rng rng(99);
  for (int i = 0; i < 40; ++i) {
    RatSpnConfig cfg;
    cfg.num_rvs = 2 + static_cast<std::uint32_t>(rng() % 20);
    std::uint32_t max_depth = 1;
    while ((2u << max_depth) <= cfg.num_rvs) ++max_depth;
    cfg.split_depth = 1 + static_cast<std::uint32_t>(rng() % max_depth);
    cfg.num_replicas = 1 + static_cast<std::uint32_t>(rng() % 3);
    cfg.sums_per_region = 1 + static_cast<std::uint32_t>(rng() % 3);
    cfg.leaves_per_rv = 1 + static_cast<std::uint32_t>(rng() % 3);
    cfg.seed = rng();
    const SpnGraph spn = generate_rat_spn(cfg);
    EXPECT_TRUE(validate(spn).valid);
    const auto sc = scopes(spn);
    EXPECT_EQ(sc[spn.root()].size(), cfg.num_rvs);
  }
}

TEST(RatSpn, InvalidConfigs) {
  EXPECT_THROW(generate_rat_spn({2, 2, 1, 1, 1, 0}), DomainError);
  EXPECT_THROW(generate_rat_spn({4, 0, 1, 1, 1, 0}), DomainError);
  EXPECT_THROW(generate_rat_spn({4, 1, 0, 1, 1, 0}), DomainError);
  EXPECT_THROW(generate_rat_spn({4, 1, 1, 0, 1, 0}), DomainError);
  EXPECT_THROW(generate_rat_spn({4, 1, 1, 1, 0, 0}), DomainError);
}

TEST(RatSpn, DefaultParameters) {
  for (auto fam : {LeafFamily::Gaussian, LeafFamily::Poisson, LeafFamily::Bernoulli}) {
    const SpnGraph spn = generate_rat_spn({4, 1, 1, 2, 2, 3, fam});
    for (const Node& n : spn.nodes()) {
      if (n.type == NodeType::Sum) {
        for (double w : n.weights) EXPECT_DOUBLE_EQ(w, 1.0 / static_cast<double>(n.weights.size()));
      } else if (n.type == NodeType::Leaf) {
        if (fam == LeafFamily::Gaussian) {
          EXPECT_EQ(std::get<Gaussian>(n.dist), (Gaussian{0.0, 1.0}));
        }
        if (fam == LeafFamily::Poisson) {
          EXPECT_EQ(std::get<Poisson>(n.dist), (Poisson{1.0}));
        }
        if (fam == LeafFamily::Bernoulli) {
          EXPECT_EQ(std::get<Bernoulli>(n.dist), (Bernoulli{0.5}));
        }
      }
    }
  }
}

TEST(SpnSerialize, RoundTrip) {
  for (const auto& [name, spn] : t::corpus()) {
    const std::string text = serialize_spn(spn);
    EXPECT_EQ(parse_spn(text), spn) << name;
    EXPECT_EQ(serialize_spn(parse_spn(text)), text) << name;
  }
}

TEST(SpnSerialize, EvidenceRoundTrip) {
  const Evidence ev = ev_of({1.0, std::nullopt, 0.0});
  EXPECT_EQ(parse_evidence(serialize_evidence(ev)).values, ev.values);
  EXPECT_THROW(parse_evidence(R"({"values": 3})"), InputError);
}
