#include "ps/hnm.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"
#include "ps/error.hpp"

namespace ps {

void PositiveSets::add(std::size_t slot, Loc member) {
  std::vector<Loc>& v = sets_[slot];
  auto it = std::lower_bound(v.begin(), v.end(), member);
  if (it == v.end() || *it != member) v.insert(it, member);
}

bool PositiveSets::contains(std::size_t slot, Loc member) const {
  const std::vector<Loc>& v = sets_[slot];
  return std::binary_search(v.begin(), v.end(), member);
}

std::size_t PositiveSets::total_members() const {
  std::size_t n = 0;
  for (const auto& v : sets_) n += v.size();
  return n;
}

std::vector<int> candidate_set(int anchor_row, const SimilarityMatrix& sims, double delta) {
  std::vector<int> out;
  for (int j = 0; j < sims.cols(); ++j) {
    if (sims.entry(anchor_row, j) > delta) out.push_back(j);
  }
  return out;
}

std::optional<int> wta(int anchor_row, const std::vector<int>& candidates, const SimilarityMatrix& sims) {
  std::optional<int> best;
  double best_s = 0.0;
  for (int j : candidates) {
    const double s = sims.entry(anchor_row, j);
    if (!best || s > best_s) {
      best = j;
      best_s = s;
    }
  }
  return best;
}

namespace {

SimilarityMatrix transposed(const SimilarityMatrix& m) {
  SimilarityMatrix t(m.cols(), m.rows(), m.offset());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) t.base(j, i) = m.base(i, j);
  }
  return t;
}

}  // namespace

std::optional<int> cycle_consistent_match(int anchor_row, const SimilarityMatrix& sims, double delta) {
  std::optional<int> fwd = wta(anchor_row, candidate_set(anchor_row, sims, delta), sims);
  if (!fwd) return std::nullopt;
  // Backward WTA from the winner over the anchor's image, same threshold.
  const SimilarityMatrix back = transposed(sims);
  std::optional<int> bwd = wta(*fwd, candidate_set(*fwd, back, delta), back);
  if (bwd && *bwd == anchor_row) return fwd;
  return std::nullopt;
}

PositiveSets positive_sets(const Gallery& g, const FeatureStore& store, double delta, const PairMatrix& offsets) {
  PositiveSets sets(g.instance_count());
  const int n = g.num_images();
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l) {
      const SimilarityMatrix m = pairwise(store, g, k, l, offsets.at(k, l));
      const SimilarityMatrix mt = transposed(m);
      for (int i = 0; i < m.rows(); ++i) {
        if (std::optional<int> j = cycle_consistent_match(i, m, delta)) {
          sets.add(g.slot(k, i), Loc{l, *j});
        }
      }
      for (int j = 0; j < m.cols(); ++j) {
        if (std::optional<int> i = cycle_consistent_match(j, mt, delta)) {
          sets.add(g.slot(l, j), Loc{k, *i});
        }
      }
    }
  }
  return sets;
}

PositiveSets threshold_sets(const Gallery& g, const FeatureStore& store, double delta, const PairMatrix& offsets) {
  PositiveSets sets(g.instance_count());
  const int n = g.num_images();
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l) {
      const SimilarityMatrix m = pairwise(store, g, k, l, offsets.at(k, l));
      for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
          if (m.entry(i, j) > delta) {
            sets.add(g.slot(k, i), Loc{l, j});
            sets.add(g.slot(l, j), Loc{k, i});
          }
        }
      }
    }
  }
  return sets;
}

void save_positive_sets(const Gallery& g, const PositiveSets& sets, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write positive-sets file '" + path + "'");
  for (int k = 0; k < g.num_images(); ++k) {
    for (int i = 0; i < static_cast<int>(g.image(k).instances.size()); ++i) {
      nlohmann::json j;
      j["anchor"] = nlohmann::json::array({g.image(k).image_id, i});
      std::vector<std::pair<std::string, int>> members;
      for (const Loc& m : sets.members(g.slot(k, i))) {
        members.emplace_back(g.image(m.image).image_id, m.index);
      }
      std::sort(members.begin(), members.end());
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& [id, idx] : members) arr.push_back(nlohmann::json::array({id, idx}));
      j["members"] = std::move(arr);
      out << j.dump() << '\n';
    }
  }
}

PositiveSets load_positive_sets(const Gallery& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open positive-sets file '" + path + "'");
  PositiveSets sets(g.instance_count());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    const auto& a = j.at("anchor");
    const int k = g.image_index(a.at(0).get<std::string>());
    const int i = a.at(1).get<int>();
    for (const auto& m : j.at("members")) {
      const int l = g.image_index(m.at(0).get<std::string>());
      sets.add(g.slot(k, i), Loc{l, m.at(1).get<int>()});
    }
  }
  return sets;
}

}  // namespace ps
