#include "ps/hpm.hpp"

#include "ps/error.hpp"

namespace ps {

double co_appearance(const Gallery& g, const FeatureStore& store, const PositiveSets& sets, int k, int l) {
  double a = 0.0;
  const int nk = static_cast<int>(g.image(k).instances.size());
  for (int i = 0; i < nk; ++i) {
    for (const Loc& m : sets.members(g.slot(k, i))) {
      if (m.image != l) continue;
      a += similarity(store.get(g.slot(k, i)), store.get(g.slot(m.image, m.index)));
    }
  }
  return a;
}

HpmResult run_hpm(const Gallery& g, const FeatureStore& store, const HpmConfig& config) {
  if (config.beta < 0.0) throw ConfigError("beta must be non-negative");
  if (config.max_iters < 0) throw ConfigError("hpm_max_iters must be non-negative");

  const int n = g.num_images();
  const auto match = [&](const PairMatrix& offsets) {
    return config.use_hnm ? positive_sets(g, store, config.delta, offsets)
                          : threshold_sets(g, store, config.delta, offsets);
  };

  HpmResult r;
  r.coappearance = PairMatrix(n);
  PairMatrix offsets(n);
  r.sets = match(offsets);
  r.trace.push_back({0, {}, r.sets.total_members()});

  for (int t = 1; t <= config.max_iters; ++t) {
    PairMatrix coapp(n);
    HpmIterationTrace it{t, {}, 0};
    for (int k = 0; k < n; ++k) {
      for (int l = k + 1; l < n; ++l) {
        const double a = co_appearance(g, store, r.sets, k, l);
        coapp.set(k, l, a);
        offsets.set(k, l, config.beta * a);
        if (a != 0.0) it.pairs.push_back({k, l, a, config.beta * a});
      }
    }
    PositiveSets next = match(offsets);
    it.total_members = next.total_members();
    r.trace.push_back(std::move(it));
    r.coappearance = coapp;
    r.iterations = t;
    if (next == r.sets) {
      return r;  // fixpoint
    }
    r.sets = std::move(next);
    if (t == config.max_iters) r.cap_terminated = true;
  }
  return r;
}

}  // namespace ps
