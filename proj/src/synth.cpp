#include "ps/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ps/error.hpp"
#include "ps/simd.hpp"

namespace ps {

double SynthRng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

std::vector<double> random_unit_vector(SynthRng& rng, int dim) {
  std::vector<double> v(static_cast<std::size_t>(dim));
  double norm = 0.0;
  while (norm == 0.0) {
    for (double& x : v) x = rng.normal();
    norm = std::sqrt(simd::dot(v, v));
  }
  for (double& x : v) x /= norm;
  return v;
}

// Fisher-Yates draw of k distinct values from pool's front.
std::vector<int> sample_distinct(SynthRng& rng, std::vector<int> pool, std::size_t k) {
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

Gallery generate(const SynthConfig& c) {
  if (c.n_identities < 1 || c.n_images < 1 || c.group_size < 1 || c.dim < 1 || c.n_cameras < 1) {
    throw ConfigError("synth: counts must be positive");
  }
  if (c.persons_min < 0 || c.persons_min > c.persons_max) {
    throw ConfigError("synth: invalid persons-per-image range");
  }
  if (c.persons_max > c.n_identities) {
    throw ConfigError("synth: uniqueness unsatisfiable (persons_per_image max exceeds n_identities)");
  }
  if (c.p_group_cohesion < 0.0 || c.p_group_cohesion > 1.0) {
    throw ConfigError("synth: p_group_cohesion must be in [0, 1]");
  }
  if (c.noise_sigma < 0.0) throw ConfigError("synth: noise_sigma must be non-negative");

  SynthRng rng(c.seed);
  std::vector<std::vector<double>> prototypes;
  prototypes.reserve(static_cast<std::size_t>(c.n_identities));
  for (int id = 0; id < c.n_identities; ++id) prototypes.push_back(random_unit_vector(rng, c.dim));

  const int n_groups = (c.n_identities + c.group_size - 1) / c.group_size;
  std::vector<int> all_ids(static_cast<std::size_t>(c.n_identities));
  for (int id = 0; id < c.n_identities; ++id) all_ids[static_cast<std::size_t>(id)] = id;

  std::vector<GalleryImage> images;
  images.reserve(static_cast<std::size_t>(c.n_images));
  for (int k = 0; k < c.n_images; ++k) {
    const int n = c.persons_min + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(c.persons_max - c.persons_min + 1)));
    const bool cohesive = rng.uniform() < c.p_group_cohesion;

    std::vector<int> chosen;
    if (cohesive) {
      const int group = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_groups)));
      std::vector<int> members;
      for (int id = group * c.group_size; id < std::min((group + 1) * c.group_size, c.n_identities); ++id) {
        members.push_back(id);
      }
      const std::size_t take = std::min(static_cast<std::size_t>(n), members.size());
      chosen = sample_distinct(rng, members, take);
      if (static_cast<int>(chosen.size()) < n) {
        std::vector<int> rest;
        for (int id : all_ids) {
          if (std::find(chosen.begin(), chosen.end(), id) == chosen.end()) rest.push_back(id);
        }
        for (int id : sample_distinct(rng, rest, static_cast<std::size_t>(n) - chosen.size())) chosen.push_back(id);
      }
    } else {
      chosen = sample_distinct(rng, all_ids, static_cast<std::size_t>(n));
    }

    GalleryImage img;
    img.image_id = "img" + std::to_string(k);
    img.camera_id = "cam" + std::to_string(k % c.n_cameras);
    for (int id : chosen) {
      PersonInstance p;
      p.label = "id" + std::to_string(id);
      if (c.noise_sigma == 0.0) {
        p.feature = prototypes[static_cast<std::size_t>(id)];
      } else {
        // noise_sigma scales the whole perturbation vector: per-component std
        // sigma/sqrt(D), so E||noise|| ~ sigma regardless of dimension.
        const double component_sigma = c.noise_sigma / std::sqrt(static_cast<double>(c.dim));
        p.feature = prototypes[static_cast<std::size_t>(id)];
        for (double& x : p.feature) x += component_sigma * rng.normal();
        const double norm = std::sqrt(simd::dot(p.feature, p.feature));
        if (norm == 0.0) throw std::runtime_error("synth: degenerate zero observation");
        for (double& x : p.feature) x /= norm;
      }
      img.instances.push_back(std::move(p));
    }
    images.push_back(std::move(img));
  }
  return Gallery(std::move(images));
}

}  // namespace ps
