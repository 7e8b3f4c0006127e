#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "cryptospn/circuit/circuit.hpp"
#include "cryptospn/circuit/simulate.hpp"
#include "cryptospn/cost/cost_model.hpp"
#include "cryptospn/spn/spn.hpp"

namespace cryptospn::testing {

using Rng = std::mt19937_64;

std::filesystem::path data_dir();

/// One sum over two products of two Bernoulli leaves: 0.5·B(.8)B(.2) + 0.5·B(.6)B(.4).
SpnGraph mixture_spn();

struct RandomSpnOptions {
  LeafFamily family = LeafFamily::Bernoulli;
  std::uint32_t min_rvs = 1;
  std::uint32_t max_rvs = 4;
  std::uint32_t max_depth = 4;
  std::size_t max_nodes = 200;
};

/// Valid tree-shaped SPN with random structure and parameters.
SpnGraph random_spn(Rng& rng, const RandomSpnOptions& opt);

/// Fully observed evidence; with `missing_rate` > 0 some entries are left empty.
Evidence random_evidence(Rng& rng, const SpnGraph& spn, double missing_rate = 0.0);

/// Probability of the evidence computed in the linear domain from the pmf/pdf.
double linear_probability(const SpnGraph& spn, const Evidence& ev);

/// AND gates of the cost formula, walked node by node with the given block costs.
std::uint64_t formula_and_count(const SpnGraph& spn, int bits, std::uint64_t add, std::uint64_t mul,
                                std::uint64_t exp2, std::uint64_t log2, std::uint64_t mux);

struct NamedSpn {
  std::string name;
  SpnGraph spn;
};

/// Shared corpus: the two-product mixture, RAT-SPNs of every leaf family and random SPNs.
std::vector<NamedSpn> corpus();

/// Distance in units in the last place between two finite values of the format.
std::uint64_t ulp_distance(std::uint64_t a_bits, std::uint64_t b_bits, FloatFormat fmt);

BitVector random_bits(Rng& rng, std::size_t n);

/// simulate() over many assignments, 64 at a time through simulate_lanes().
std::vector<BitVector> simulate_batch(const Circuit& circuit, const std::vector<BitVector>& client,
                                      const std::vector<BitVector>& server);

}  // namespace cryptospn::testing
