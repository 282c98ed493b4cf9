#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ps/gallery.hpp"

namespace ps {

// Deterministic random source for gallery generation: std::mt19937_64 (whose
// output sequence the standard fixes) with hand-rolled uniform and Box-Muller
// normal transforms, so generation is a pure function of the seed everywhere.
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in (0, 1].
  double uniform() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }
  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) { return next_u64() % n; }
  // Standard normal via Box-Muller (one draw per call, no caching).
  double normal();

 private:
  std::mt19937_64 engine_;
};

struct SynthConfig {
  int n_identities = 40;
  int n_images = 80;
  int persons_min = 2;
  int persons_max = 4;
  int group_size = 3;            // identities per co-appearance group
  double p_group_cohesion = 0.9; // chance an image draws from one group
  double noise_sigma = 0.0;      // isotropic perturbation scale before renormalization
  int dim = 128;
  int n_cameras = 1;
  std::uint64_t seed = 0;
};

// Seeded synthetic gallery: random unit prototypes per identity, identities
// partitioned into consecutive groups, images sampled per the cohesion
// probability, each observation emitted as prototype + noise renormalized.
// Uniqueness holds in every image; cameras round-robin. Throws ConfigError
// when the config is unsatisfiable.
Gallery generate(const SynthConfig& c);

}  // namespace ps
