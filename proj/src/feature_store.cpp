#include "ps/feature_store.hpp"

#include <cmath>
#include <string>

#include "ps/error.hpp"
#include "ps/simd.hpp"

namespace ps {

FeatureStore FeatureStore::from_gallery(const Gallery& g) {
  FeatureStore store(g.dim(), g.instance_count());
  for (int k = 0; k < g.num_images(); ++k) {
    const GalleryImage& img = g.image(k);
    for (int i = 0; i < static_cast<int>(img.instances.size()); ++i) {
      store.update(g.slot(k, i), img.instances[static_cast<std::size_t>(i)].feature);
    }
  }
  return store;
}

bool FeatureStore::populated(std::size_t slot) const {
  std::span<const double> f = get(slot);
  for (double v : f) {
    if (v != 0.0) return true;
  }
  return false;
}

void FeatureStore::update(std::size_t slot, std::span<const double> g) {
  if (static_cast<int>(g.size()) != dim_) throw ValidationError("update: dimension mismatch");
  if (std::abs(std::sqrt(simd::dot(g, g)) - 1.0) > 1e-6) {
    throw ValidationError("update: extracted feature is not unit norm");
  }
  double* f = data_.data() + slot * static_cast<std::size_t>(dim_);
  std::vector<double> sum(static_cast<std::size_t>(dim_));
  for (int d = 0; d < dim_; ++d) sum[static_cast<std::size_t>(d)] = f[d] + g[static_cast<std::size_t>(d)];
  double z = std::sqrt(simd::dot(sum, sum));
  if (z == 0.0) throw ValidationError("update: f + g is the zero vector, slot unchanged");
  for (int d = 0; d < dim_; ++d) f[d] = sum[static_cast<std::size_t>(d)] / z;
}

double similarity(std::span<const double> f, std::span<const double> g) {
  if (f.size() != g.size()) throw ValidationError("similarity: dimension mismatch");
  return simd::dot(f, g);
}

SimilarityMatrix pairwise(const FeatureStore& store, const Gallery& g, int k, int l, double offset) {
  const int nk = static_cast<int>(g.image(k).instances.size());
  const int nl = static_cast<int>(g.image(l).instances.size());
  SimilarityMatrix m(nk, nl, offset);
  for (int i = 0; i < nk; ++i) {
    const std::size_t si = g.slot(k, i);
    if (!store.populated(si)) throw ValidationError("pairwise: unpopulated slot in image " + g.image(k).image_id);
    for (int j = 0; j < nl; ++j) {
      const std::size_t sj = g.slot(l, j);
      if (!store.populated(sj)) throw ValidationError("pairwise: unpopulated slot in image " + g.image(l).image_id);
      m.base(i, j) = similarity(store.get(si), store.get(sj));
    }
  }
  return m;
}

}  // namespace ps
