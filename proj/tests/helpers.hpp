#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ps/feature_store.hpp"
#include "ps/gallery.hpp"
#include "ps/synth.hpp"

namespace helpers {

struct Inst {
  std::string label;
  std::vector<double> feature;
};

inline ps::Gallery make_gallery(const std::vector<std::vector<Inst>>& images,
                                const std::vector<std::string>& cameras = {}) {
  std::vector<ps::GalleryImage> out;
  for (std::size_t k = 0; k < images.size(); ++k) {
    ps::GalleryImage img;
    img.image_id = "I" + std::to_string(k + 1);
    if (k < cameras.size()) img.camera_id = cameras[k];
    for (const Inst& in : images[k]) {
      ps::PersonInstance p;
      p.label = in.label;
      p.feature = in.feature;
      img.instances.push_back(std::move(p));
    }
    out.push_back(std::move(img));
  }
  return ps::Gallery(std::move(out));
}

inline std::vector<double> unit(std::vector<double> v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  for (double& x : v) x /= n;
  return v;
}

inline std::vector<double> random_unit(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> nd;
  std::vector<double> v(static_cast<std::size_t>(dim));
  for (double& x : v) x = nd(rng);
  return unit(std::move(v));
}

// Small noisy identity-structured gallery for matching tests.
inline ps::Gallery random_gallery(std::uint64_t seed, int max_images = 5, int max_instances = 6, int dim = 8) {
  ps::SynthConfig c;
  c.seed = seed;
  c.n_identities = 6;
  c.n_images = 2 + static_cast<int>(seed % static_cast<std::uint64_t>(max_images - 1));
  c.persons_min = 1;
  c.persons_max = std::min(max_instances, c.n_identities);
  c.group_size = 3;
  c.p_group_cohesion = 0.5;
  c.noise_sigma = 0.25;
  c.dim = dim;
  c.n_cameras = 2;
  return ps::generate(c);
}

}  // namespace helpers
