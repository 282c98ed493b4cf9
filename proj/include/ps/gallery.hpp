#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ps {

// Sentinel identity for persons without a ground-truth label. Unlabeled
// persons stay in the gallery (the multi-view protocol ranks them as
// distractors) but never count as positives.
inline constexpr std::string_view kUnlabeled = "UNLABELED";

// Addresses one person instance: the image it was detected in and its
// zero-based position within that image's instance list.
struct InstanceRef {
  std::string image_id;
  int index = 0;
  auto operator<=>(const InstanceRef&) const = default;
};

struct PersonInstance {
  std::string label{kUnlabeled};
  std::vector<double> feature;

  bool labeled() const { return label != kUnlabeled; }
};

struct GalleryImage {
  std::string image_id;
  std::optional<std::string> camera_id;
  std::vector<PersonInstance> instances;
};

// Immutable, validated set of gallery images. All features are unit-norm
// doubles of one shared dimension; within an image no two instances carry
// the same non-sentinel label.
class Gallery {
 public:
  Gallery() = default;
  // Validates and takes ownership; features whose norm deviates from 1 by
  // at most 1e-3 are renormalized, larger deviations are rejected.
  explicit Gallery(std::vector<GalleryImage> images);

  const std::vector<GalleryImage>& images() const { return images_; }
  const GalleryImage& image(int k) const { return images_[static_cast<std::size_t>(k)]; }
  int num_images() const { return static_cast<int>(images_.size()); }
  int dim() const { return dim_; }
  std::size_t instance_count() const { return total_; }

  // Flat slot id of instance i of image k; slots enumerate instances in
  // image order, then index order.
  std::size_t slot(int k, int i) const {
    return offsets_[static_cast<std::size_t>(k)] + static_cast<std::size_t>(i);
  }
  const PersonInstance& instance(int k, int i) const {
    return images_[static_cast<std::size_t>(k)].instances[static_cast<std::size_t>(i)];
  }
  // Index of the image with the given id; throws ValidationError if absent.
  int image_index(std::string_view image_id) const;

 private:
  std::vector<GalleryImage> images_;
  std::vector<std::size_t> offsets_;
  std::map<std::string, int, std::less<>> by_id_;
  std::size_t total_ = 0;
  int dim_ = 0;
};

// JSON Lines gallery files, one image per line:
//   {"image_id": str, "camera_id": str|null,
//    "instances": [{"label": str|null, "feature": [number x D]}]}
// A null or missing label maps to the sentinel.
Gallery load_gallery(const std::string& path);
void save_gallery(const Gallery& g, const std::string& path);

// min(|a.instances|, |b.instances|)
int matching_capacity(const GalleryImage& a, const GalleryImage& b);

struct CoappearanceBin {
  long single = 0;    // image pairs with exactly one shared identity
  long multiple = 0;  // image pairs with two or more
};

// Histogram over matching capacity of all unordered image pairs sharing at
// least one non-sentinel identity. Throws ConfigError when the gallery has
// no labeled instance at all.
std::map<int, CoappearanceBin> coappearance_stats(const Gallery& g);

}  // namespace ps
