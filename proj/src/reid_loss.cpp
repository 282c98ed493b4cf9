#include "ps/reid_loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ps/error.hpp"

namespace ps {

std::vector<std::size_t> hard_negative_set(const FeatureStore& store, std::size_t anchor,
                                           const std::vector<std::size_t>& positives, double ratio) {
  if (ratio <= 0.0 || ratio > 1.0) throw ConfigError("hard_neg_ratio must be in (0, 1]");
  std::vector<bool> excluded(store.size(), false);
  excluded[anchor] = true;
  for (std::size_t p : positives) excluded[p] = true;

  std::span<const double> g = store.get(anchor);
  std::vector<std::pair<double, std::size_t>> pool;  // (-similarity, slot)
  for (std::size_t s = 0; s < store.size(); ++s) {
    if (excluded[s]) continue;
    pool.emplace_back(-similarity(store.get(s), g), s);
  }
  if (pool.empty()) return {};

  const std::size_t count = std::min(pool.size(), static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(pool.size()))));
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count), pool.end());
  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(pool[i].second);
  return out;
}

namespace {

// Stabilized softmax weights over the population C then D, in that order.
std::vector<double> softmax_weights(std::span<const double> g, const std::vector<std::size_t>& positives,
                                    const std::vector<std::size_t>& negatives, const FeatureStore& store, double tau) {
  if (tau <= 0.0) throw ConfigError("tau must be positive");
  if (positives.empty() && negatives.empty()) throw ConfigError("empty softmax population");
  std::vector<double> logits;
  logits.reserve(positives.size() + negatives.size());
  for (std::size_t s : positives) logits.push_back(similarity(store.get(s), g) / tau);
  for (std::size_t s : negatives) logits.push_back(similarity(store.get(s), g) / tau);
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double& x : logits) {
    x = std::exp(x - m);
    z += x;
  }
  for (double& x : logits) x /= z;
  return logits;
}

}  // namespace

double probability(std::span<const double> g, std::size_t target, const std::vector<std::size_t>& positives,
                   const std::vector<std::size_t>& negatives, const FeatureStore& store, double tau) {
  const std::vector<double> p = softmax_weights(g, positives, negatives, store, tau);
  for (std::size_t i = 0; i < positives.size(); ++i) {
    if (positives[i] == target) return p[i];
  }
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    if (negatives[i] == target) return p[positives.size() + i];
  }
  throw ConfigError("probability: target not in population");
}

LossResult reid_loss(std::span<const double> g, const std::vector<std::size_t>& positives,
                     const std::vector<std::size_t>& negatives, const FeatureStore& store, double tau) {
  if (positives.empty()) throw ConfigError("reid_loss: empty positive set");
  const std::vector<double> p = softmax_weights(g, positives, negatives, store, tau);

  LossResult r;
  r.positive_probs.assign(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(positives.size()));
  for (double pi : r.positive_probs) r.value -= std::log(pi);
  r.value /= static_cast<double>(positives.size());

  // d/dg [-1/|C| sum_j log p_j] = (1/tau) (sum_m p_m f_m - 1/|C| sum_j f_j)
  const int dim = store.dim();
  r.gradient.assign(static_cast<std::size_t>(dim), 0.0);
  std::size_t m = 0;
  for (std::size_t s : positives) {
    std::span<const double> f = store.get(s);
    for (int d = 0; d < dim; ++d) {
      r.gradient[static_cast<std::size_t>(d)] += (p[m] - 1.0 / static_cast<double>(positives.size())) * f[static_cast<std::size_t>(d)];
    }
    ++m;
  }
  for (std::size_t s : negatives) {
    std::span<const double> f = store.get(s);
    for (int d = 0; d < dim; ++d) {
      r.gradient[static_cast<std::size_t>(d)] += p[m] * f[static_cast<std::size_t>(d)];
    }
    ++m;
  }
  for (double& gd : r.gradient) gd /= tau;
  return r;
}

}  // namespace ps
