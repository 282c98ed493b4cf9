#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ps/gallery.hpp"

namespace ps {

// Global feature memory: one D-vector per gallery instance, zero-initialized,
// kept unit-norm by the running-mean update. Mutation is single-writer;
// queries are pure over a snapshot.
class FeatureStore {
 public:
  FeatureStore(int dim, std::size_t slots) : dim_(dim), data_(static_cast<std::size_t>(dim) * slots, 0.0), slots_(slots) {}

  // Store populated directly from the gallery features via the update rule.
  static FeatureStore from_gallery(const Gallery& g);

  int dim() const { return dim_; }
  std::size_t size() const { return slots_; }

  std::span<const double> get(std::size_t slot) const {
    return {data_.data() + slot * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  bool populated(std::size_t slot) const;

  // f <- (f + g) / ||f + g||. Throws ValidationError when f + g vanishes
  // (slot left unchanged) or on dimension mismatch / non-unit g.
  void update(std::size_t slot, std::span<const double> g);

 private:
  int dim_;
  std::vector<double> data_;
  std::size_t slots_;
};

// Inner product of two unit vectors. Throws ValidationError on dimension
// mismatch.
double similarity(std::span<const double> f, std::span<const double> g);

// All similarities between the instances of an ordered image pair, plus one
// uniform additive offset (the co-appearance shift).
class SimilarityMatrix {
 public:
  SimilarityMatrix(int rows, int cols, double offset)
      : rows_(rows), cols_(cols), offset_(offset), base_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double offset() const { return offset_; }

  double base(int i, int j) const { return base_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j)]; }
  double& base(int i, int j) { return base_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j)]; }
  double entry(int i, int j) const { return base(i, j) + offset_; }

 private:
  int rows_, cols_;
  double offset_;
  std::vector<double> base_;
};

// Similarity matrix of image pair (k, l) from the store's memory vectors.
// Throws ValidationError if any referenced slot is still the zero vector.
SimilarityMatrix pairwise(const FeatureStore& store, const Gallery& g, int k, int l, double offset);

}  // namespace ps
