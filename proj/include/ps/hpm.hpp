#pragma once

#include <vector>

#include "ps/hnm.hpp"

namespace ps {

struct HpmConfig {
  double delta = 0.6;
  double beta = 0.1;
  int max_iters = 3;
  bool use_hnm = true;  // false runs the thresholded ablation arm instead
};

struct HpmPairTrace {
  int k = 0;
  int l = 0;
  double coappearance = 0.0;
  double offset = 0.0;
};

struct HpmIterationTrace {
  int t = 0;
  std::vector<HpmPairTrace> pairs;  // pairs with nonzero co-appearance
  std::size_t total_members = 0;
};

struct HpmResult {
  PositiveSets sets;
  PairMatrix coappearance{0};  // A at the final iteration
  int iterations = 0;          // last iteration executed
  bool cap_terminated = false; // cap hit with sets still changing
  std::vector<HpmIterationTrace> trace;
};

// Co-appearance A(k,l): sum of base similarities over every anchor of image k
// whose positive set holds a member in image l.
double co_appearance(const Gallery& g, const FeatureStore& store, const PositiveSets& sets, int k, int l);

// Similarity shift of one iteration, applied to the original base value.
inline double updated_similarity(double base, double coappearance, double beta) {
  return base + beta * coappearance;
}

// Iteration 0 is plain HNM. Each following iteration recomputes the per-pair
// offsets beta * A from the current sets and reruns the matcher, until the
// sets stop changing or the cap is reached.
HpmResult run_hpm(const Gallery& g, const FeatureStore& store, const HpmConfig& config);

}  // namespace ps
