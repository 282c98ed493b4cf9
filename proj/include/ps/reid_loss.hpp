#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ps/feature_store.hpp"

namespace ps {

struct LossConfig {
  double tau = 0.1;             // softmax temperature
  double hard_neg_ratio = 0.01; // fraction of non-positives kept as hard negatives
};

struct LossResult {
  double value = 0.0;
  std::vector<double> positive_probs;  // p for each member of C, in C order
  std::vector<double> gradient;        // d value / d g
};

// Hard negatives of an anchor slot: the ceil(ratio * |U|) most similar members
// of U = all slots minus the positives minus the anchor (at least one when U
// is nonempty). Ties by lowest slot.
std::vector<std::size_t> hard_negative_set(const FeatureStore& store, std::size_t anchor,
                                           const std::vector<std::size_t>& positives, double ratio);

// Softmax probability of the target within the population C u D at
// temperature tau, max-stabilized. Throws ConfigError when the target is not
// in the population or the population is empty.
double probability(std::span<const double> g, std::size_t target, const std::vector<std::size_t>& positives,
                   const std::vector<std::size_t>& negatives, const FeatureStore& store, double tau);

// Mean negative log probability over the positives, with the analytic
// gradient with respect to g. Throws ConfigError when C is empty.
LossResult reid_loss(std::span<const double> g, const std::vector<std::size_t>& positives,
                     const std::vector<std::size_t>& negatives, const FeatureStore& store, double tau);

}  // namespace ps
