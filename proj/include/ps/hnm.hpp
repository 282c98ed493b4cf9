#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ps/feature_store.hpp"
#include "ps/gallery.hpp"

namespace ps {

// Internal instance address: image position in the gallery, instance index
// within the image.
struct Loc {
  int image = 0;
  int index = 0;
  auto operator<=>(const Loc&) const = default;
};

// Symmetric per-image-pair scalar table (co-appearance scores and the
// similarity offsets derived from them).
class PairMatrix {
 public:
  explicit PairMatrix(int n) : n_(n), v_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0) {}

  int size() const { return n_; }
  double at(int k, int l) const { return v_[idx(k, l)]; }
  void set(int k, int l, double x) {
    v_[idx(k, l)] = x;
    v_[idx(l, k)] = x;
  }
  bool operator==(const PairMatrix&) const = default;

 private:
  std::size_t idx(int k, int l) const {
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(l);
  }
  int n_;
  std::vector<double> v_;
};

// Per-anchor positive sets C(x), indexed by flat instance slot. Members are
// kept sorted by (image, index). After HNM each anchor has at most one member
// per image; the thresholded ablation arm may hold several.
class PositiveSets {
 public:
  PositiveSets() = default;
  explicit PositiveSets(std::size_t slots) : sets_(slots) {}

  std::size_t slots() const { return sets_.size(); }
  const std::vector<Loc>& members(std::size_t slot) const { return sets_[slot]; }
  void add(std::size_t slot, Loc member);
  bool contains(std::size_t slot, Loc member) const;
  std::size_t total_members() const;
  bool operator==(const PositiveSets&) const = default;

 private:
  std::vector<std::vector<Loc>> sets_;
};

// Instances of the column image with similarity strictly above delta to the
// anchor row (offset included). Ascending index order.
std::vector<int> candidate_set(int anchor_row, const SimilarityMatrix& sims, double delta);

// Winner-take-all: candidate with the highest similarity to the anchor row;
// ties broken by lowest index; nullopt when empty.
std::optional<int> wta(int anchor_row, const std::vector<int>& candidates, const SimilarityMatrix& sims);

// Forward WTA from the anchor row, then the backward WTA from the winner over
// the rows; the match stands only if the backward pass returns the anchor.
std::optional<int> cycle_consistent_match(int anchor_row, const SimilarityMatrix& sims, double delta);

// C(x) for every instance: the union over all other images of the
// cycle-consistent match, under the given per-pair similarity offsets.
PositiveSets positive_sets(const Gallery& g, const FeatureStore& store, double delta, const PairMatrix& offsets);

// Ablation arm: plain thresholding of Eq-style candidates with no WTA and no
// cycle check; every instance above delta joins the set.
PositiveSets threshold_sets(const Gallery& g, const FeatureStore& store, double delta, const PairMatrix& offsets);

// JSON Lines, one anchor per line:
//   {"anchor": [image_id, index], "members": [[image_id, index], ...]}
// with members sorted lexicographically.
void save_positive_sets(const Gallery& g, const PositiveSets& sets, const std::string& path);
PositiveSets load_positive_sets(const Gallery& g, const std::string& path);

}  // namespace ps
