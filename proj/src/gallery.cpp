#include "ps/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ps/error.hpp"
#include "ps/simd.hpp"

namespace ps {

namespace {

void validate_and_repair_feature(std::vector<double>& f, const std::string& where) {
  for (double v : f) {
    if (!std::isfinite(v)) throw ValidationError("non-finite feature component at " + where);
  }
  double norm = std::sqrt(simd::dot(f, f));
  if (norm == 0.0) throw ValidationError("zero feature vector at " + where);
  if (std::abs(norm - 1.0) > 1e-3) {
    throw ValidationError("feature norm " + std::to_string(norm) + " deviates from 1 by more than 1e-3 at " + where);
  }
  if (std::abs(norm - 1.0) > 1e-6) {
    for (double& v : f) v /= norm;
  }
}

}  // namespace

Gallery::Gallery(std::vector<GalleryImage> images) : images_(std::move(images)) {
  offsets_.reserve(images_.size());
  for (std::size_t k = 0; k < images_.size(); ++k) {
    GalleryImage& img = images_[k];
    if (!by_id_.emplace(img.image_id, static_cast<int>(k)).second) {
      throw ValidationError("duplicate image_id '" + img.image_id + "'");
    }
    offsets_.push_back(total_);
    total_ += img.instances.size();

    std::set<std::string_view> seen;
    for (std::size_t i = 0; i < img.instances.size(); ++i) {
      PersonInstance& p = img.instances[i];
      const std::string where = img.image_id + "[" + std::to_string(i) + "]";
      if (p.labeled() && !seen.insert(p.label).second) {
        throw ValidationError("uniqueness violated: label '" + p.label + "' appears twice in image '" + img.image_id + "'");
      }
      if (dim_ == 0) dim_ = static_cast<int>(p.feature.size());
      if (static_cast<int>(p.feature.size()) != dim_) {
        throw ValidationError("inconsistent feature dimension at " + where);
      }
      validate_and_repair_feature(p.feature, where);
    }
  }
}

int Gallery::image_index(std::string_view image_id) const {
  auto it = by_id_.find(image_id);
  if (it == by_id_.end()) throw ValidationError("unknown image_id '" + std::string(image_id) + "'");
  return it->second;
}

Gallery load_gallery(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open gallery file '" + path + "'");

  std::vector<GalleryImage> images;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    GalleryImage img;
    img.image_id = j.at("image_id").get<std::string>();
    if (j.contains("camera_id") && !j["camera_id"].is_null()) {
      img.camera_id = j["camera_id"].get<std::string>();
    }
    for (const auto& ji : j.at("instances")) {
      PersonInstance p;
      if (ji.contains("label") && !ji["label"].is_null()) {
        p.label = ji["label"].get<std::string>();
      }
      p.feature = ji.at("feature").get<std::vector<double>>();
      img.instances.push_back(std::move(p));
    }
    images.push_back(std::move(img));
  }
  return Gallery(std::move(images));
}

void save_gallery(const Gallery& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write gallery file '" + path + "'");
  for (const GalleryImage& img : g.images()) {
    nlohmann::json j;
    j["image_id"] = img.image_id;
    j["camera_id"] = img.camera_id ? nlohmann::json(*img.camera_id) : nlohmann::json(nullptr);
    nlohmann::json arr = nlohmann::json::array();
    for (const PersonInstance& p : img.instances) {
      nlohmann::json ji;
      ji["label"] = p.labeled() ? nlohmann::json(p.label) : nlohmann::json(nullptr);
      ji["feature"] = p.feature;
      arr.push_back(std::move(ji));
    }
    j["instances"] = std::move(arr);
    out << j.dump() << '\n';
  }
}

int matching_capacity(const GalleryImage& a, const GalleryImage& b) {
  return static_cast<int>(std::min(a.instances.size(), b.instances.size()));
}

std::map<int, CoappearanceBin> coappearance_stats(const Gallery& g) {
  bool any_labeled = false;
  std::vector<std::set<std::string_view>> labels(static_cast<std::size_t>(g.num_images()));
  for (int k = 0; k < g.num_images(); ++k) {
    for (const PersonInstance& p : g.image(k).instances) {
      if (p.labeled()) {
        labels[static_cast<std::size_t>(k)].insert(p.label);
        any_labeled = true;
      }
    }
  }
  if (!any_labeled) throw ConfigError("gallery is entirely unlabeled");

  std::map<int, CoappearanceBin> bins;
  for (int k = 0; k < g.num_images(); ++k) {
    for (int l = k + 1; l < g.num_images(); ++l) {
      const auto& a = labels[static_cast<std::size_t>(k)];
      const auto& b = labels[static_cast<std::size_t>(l)];
      int shared = 0;
      for (std::string_view id : a) shared += b.count(id) ? 1 : 0;
      if (shared == 0) continue;
      CoappearanceBin& bin = bins[matching_capacity(g.image(k), g.image(l))];
      if (shared == 1) ++bin.single; else ++bin.multiple;
    }
  }
  return bins;
}

}  // namespace ps
