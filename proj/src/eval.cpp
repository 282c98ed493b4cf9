#include "ps/eval.hpp"

#include <algorithm>

#include "ps/error.hpp"

namespace ps {

namespace {

const PersonInstance& at(const Gallery& g, Loc loc) { return g.instance(loc.image, loc.index); }

}  // namespace

GalleryView build_regular_gallery(const Gallery& g, Loc query) {
  if (!at(g, query).labeled()) throw ConfigError("regular protocol: query is unlabeled");
  GalleryView v{query, {}, Protocol::regular};
  for (int k = 0; k < g.num_images(); ++k) {
    if (k == query.image) continue;
    const GalleryImage& img = g.image(k);
    for (int i = 0; i < static_cast<int>(img.instances.size()); ++i) {
      if (img.instances[static_cast<std::size_t>(i)].labeled()) v.candidates.push_back({k, i});
    }
  }
  return v;
}

GalleryView build_multiview_gallery(const Gallery& g, Loc query) {
  for (const GalleryImage& img : g.images()) {
    if (!img.camera_id) throw ConfigError("multi-view protocol: image '" + img.image_id + "' has no camera_id");
  }
  const std::string& cam = *g.image(query.image).camera_id;
  GalleryView v{query, {}, Protocol::multi_view};
  for (int k = 0; k < g.num_images(); ++k) {
    if (*g.image(k).camera_id == cam) continue;
    for (int i = 0; i < static_cast<int>(g.image(k).instances.size()); ++i) {
      v.candidates.push_back({k, i});
    }
  }
  return v;
}

RankedResult search(const Gallery& g, const FeatureStore& store, const GalleryView& view) {
  std::span<const double> q = store.get(g.slot(view.query.image, view.query.index));
  const PersonInstance& qp = at(g, view.query);

  RankedResult r{view.query, {}};
  r.ranked.reserve(view.candidates.size());
  for (Loc c : view.candidates) {
    const PersonInstance& p = at(g, c);
    const double s = similarity(store.get(g.slot(c.image, c.index)), q);
    const bool rel = qp.labeled() && p.labeled() && p.label == qp.label;
    r.ranked.push_back({c, s, rel});
  }
  std::sort(r.ranked.begin(), r.ranked.end(), [&g](const RankedCandidate& a, const RankedCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    const std::string& ia = g.image(a.loc.image).image_id;
    const std::string& ib = g.image(b.loc.image).image_id;
    return std::tie(ia, a.loc.index) < std::tie(ib, b.loc.index);
  });
  return r;
}

std::optional<double> average_precision(const RankedResult& r) {
  int total_relevant = 0;
  for (const RankedCandidate& c : r.ranked) total_relevant += c.relevant ? 1 : 0;
  if (total_relevant == 0) return std::nullopt;

  double ap = 0.0;
  int hits = 0;
  for (std::size_t p = 0; p < r.ranked.size(); ++p) {
    if (r.ranked[p].relevant) {
      ++hits;
      ap += static_cast<double>(hits) / static_cast<double>(p + 1);
    }
  }
  return ap / static_cast<double>(total_relevant);
}

Metrics evaluate(const std::vector<RankedResult>& results, const std::vector<int>& ks) {
  Metrics m;
  double ap_sum = 0.0;
  std::vector<int> hits(ks.size(), 0);
  for (const RankedResult& r : results) {
    std::optional<double> ap = average_precision(r);
    if (!ap) {
      ++m.skipped;
      continue;
    }
    ++m.num_queries;
    ap_sum += *ap;
    int first_hit = -1;
    for (std::size_t p = 0; p < r.ranked.size(); ++p) {
      if (r.ranked[p].relevant) {
        first_hit = static_cast<int>(p) + 1;
        break;
      }
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (first_hit > 0 && first_hit <= ks[i]) ++hits[i];
    }
  }
  if (m.num_queries == 0) throw ConfigError("every query was skipped (no relevant candidates)");
  m.map = ap_sum / static_cast<double>(m.num_queries);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    m.top_k.emplace_back(ks[i], static_cast<double>(hits[i]) / static_cast<double>(m.num_queries));
  }
  return m;
}

double mean_ap(const std::vector<RankedResult>& results) { return evaluate(results, {}).map; }

double top_k(const std::vector<RankedResult>& results, int k) { return evaluate(results, {k}).top_k[0].second; }

}  // namespace ps
