#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ps/feature_store.hpp"
#include "ps/hnm.hpp"

namespace ps {

enum class Protocol { regular, multi_view };

struct GalleryView {
  Loc query;
  std::vector<Loc> candidates;  // image order, then index
  Protocol protocol = Protocol::regular;
};

struct RankedCandidate {
  Loc loc;
  double score = 0.0;
  bool relevant = false;
};

struct RankedResult {
  Loc query;
  std::vector<RankedCandidate> ranked;  // scores non-increasing
};

// All labeled instances outside the query's image. The query must carry a
// non-sentinel label.
GalleryView build_regular_gallery(const Gallery& g, Loc query);

// All instances (labeled or not) of images whose camera differs from the
// query's. Every image must carry a camera_id.
GalleryView build_multiview_gallery(const Gallery& g, Loc query);

// Candidates ranked by similarity of memory features to the query's,
// descending; ties ordered by (image_id, index).
RankedResult search(const Gallery& g, const FeatureStore& store, const GalleryView& view);

// nullopt marks a query with no relevant candidate (skipped by aggregation).
std::optional<double> average_precision(const RankedResult& r);

struct Metrics {
  double map = 0.0;
  std::vector<std::pair<int, double>> top_k;
  int num_queries = 0;  // non-skipped
  int skipped = 0;
};

// Mean AP and Top-k over non-skipped queries. Throws ConfigError when every
// query is skipped.
Metrics evaluate(const std::vector<RankedResult>& results, const std::vector<int>& ks);

double mean_ap(const std::vector<RankedResult>& results);
double top_k(const std::vector<RankedResult>& results, int k);

}  // namespace ps
