#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"
#include "ps/error.hpp"
#include "ps/reid_loss.hpp"

namespace {

// Store whose slot s has similarity sims[s] to the anchor g = e1.
ps::FeatureStore store_with_sims(const std::vector<double>& sims) {
  ps::FeatureStore store(2, sims.size());
  for (std::size_t s = 0; s < sims.size(); ++s) {
    store.update(s, std::vector<double>{sims[s], std::sqrt(1.0 - sims[s] * sims[s])});
  }
  return store;
}

const std::vector<double> kAnchor{1.0, 0.0};

}  // namespace

TEST_CASE("hard_negative_set") {
  SUBCASE("ratio 1.0 keeps all of U") {
    ps::FeatureStore store = store_with_sims({1.0, 0.5, 0.3, 0.2});
    auto d = ps::hard_negative_set(store, 0, {1}, 1.0);
    CHECK(d == std::vector<std::size_t>{2, 3});
  }
  SUBCASE("empty U") {
    ps::FeatureStore store = store_with_sims({1.0, 0.5});
    CHECK(ps::hard_negative_set(store, 0, {1}, 0.01).empty());
  }
  SUBCASE("|U| = 250 at 1% keeps the top ceil(2.5) = 3") {
    std::vector<double> sims{1.0};
    for (int i = 0; i < 250; ++i) sims.push_back(0.9 - 0.003 * i);
    ps::FeatureStore store = store_with_sims(sims);
    auto d = ps::hard_negative_set(store, 0, {}, 0.01);
    CHECK(d == std::vector<std::size_t>{1, 2, 3});
  }
  SUBCASE("matches a full-sort oracle on random stores") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    for (int it = 0; it < 30; ++it) {
      std::vector<double> sims{1.0};
      for (int i = 0; i < 40; ++i) sims.push_back(ud(rng));
      ps::FeatureStore store = store_with_sims(sims);
      const std::vector<std::size_t> positives{1, 2};
      const double ratio = 0.1;
      auto got = ps::hard_negative_set(store, 0, positives, ratio);

      std::vector<std::pair<double, std::size_t>> pool;
      for (std::size_t s = 3; s < sims.size(); ++s) {
        pool.emplace_back(oracle::dot(store.get(s), store.get(0)), s);
      }
      std::sort(pool.begin(), pool.end(), [](auto& a, auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
      });
      const std::size_t n = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(pool.size())));
      std::vector<std::size_t> expect;
      for (std::size_t i = 0; i < n; ++i) expect.push_back(pool[i].second);
      CHECK(got == expect);
    }
  }
}

TEST_CASE("probability") {
  SUBCASE("singleton population") {
    ps::FeatureStore store = store_with_sims({1.0});
    CHECK(ps::probability(kAnchor, 0, {0}, {}, store, 0.1) == doctest::Approx(1.0));
    CHECK(ps::probability(kAnchor, 0, {0}, {}, store, 7.0) == doctest::Approx(1.0));
  }
  SUBCASE("worked two-member case") {
    ps::FeatureStore store = store_with_sims({0.9, 0.5});
    const double p = ps::probability(kAnchor, 0, {0}, {1}, store, 0.1);
    CHECK(p == doctest::Approx(1.0 / (1.0 + std::exp(-4.0))).epsilon(1e-9));
  }
  SUBCASE("equal similarities split evenly") {
    ps::FeatureStore store = store_with_sims({0.7, 0.7});
    CHECK(ps::probability(kAnchor, 0, {0}, {1}, store, 0.1) == doctest::Approx(0.5));
    CHECK(ps::probability(kAnchor, 1, {0}, {1}, store, 0.1) == doctest::Approx(0.5));
  }
  SUBCASE("target outside population / empty population") {
    ps::FeatureStore store = store_with_sims({0.7, 0.7, 0.1});
    CHECK_THROWS_AS(ps::probability(kAnchor, 2, {0}, {1}, store, 0.1), ps::ConfigError);
    CHECK_THROWS_AS(ps::probability(kAnchor, 0, {}, {}, store, 0.1), ps::ConfigError);
  }
  SUBCASE("no overflow at small temperatures") {
    ps::FeatureStore store = store_with_sims({0.99, -0.99});
    const double p = ps::probability(kAnchor, 0, {0}, {1}, store, 1e-3);
    CHECK(std::isfinite(p));
    CHECK(p == doctest::Approx(1.0));
  }
}

TEST_CASE("probabilities over the population sum to 1") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  for (int it = 0; it < 50; ++it) {
    std::vector<double> sims;
    for (int i = 0; i < 12; ++i) sims.push_back(ud(rng));
    ps::FeatureStore store = store_with_sims(sims);
    const std::vector<std::size_t> c{0, 1, 2};
    const std::vector<std::size_t> d{3, 4, 5, 6, 7, 8, 9, 10, 11};
    double sum = 0.0;
    for (std::size_t s = 0; s < sims.size(); ++s) sum += ps::probability(kAnchor, s, c, d, store, 0.1);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("reid_loss worked examples") {
  SUBCASE("perfect singleton has zero loss") {
    ps::FeatureStore store = store_with_sims({1.0});
    CHECK(ps::reid_loss(kAnchor, {0}, {}, store, 0.1).value == doctest::Approx(0.0));
  }
  SUBCASE("one positive one hard negative") {
    ps::FeatureStore store = store_with_sims({0.9, 0.5});
    const double expect = -std::log(1.0 / (1.0 + std::exp(-4.0)));
    CHECK(ps::reid_loss(kAnchor, {0}, {1}, store, 0.1).value == doctest::Approx(expect).epsilon(1e-9));
  }
  SUBCASE("two positives against the scalar softmax oracle") {
    ps::FeatureStore store = store_with_sims({0.9, 0.7, 0.5});
    const auto p = oracle::softmax({0.9, 0.7, 0.5}, 0.1);
    const double expect = -(std::log(p[0]) + std::log(p[1])) / 2.0;
    ps::LossResult r = ps::reid_loss(kAnchor, {0, 1}, {2}, store, 0.1);
    CHECK(r.value == doctest::Approx(expect).epsilon(1e-12));
    CHECK(r.value == doctest::Approx(1.14293).epsilon(1e-4));
    CHECK(r.positive_probs[0] == doctest::Approx(0.86682).epsilon(1e-4));
    CHECK(r.positive_probs[1] == doctest::Approx(0.11731).epsilon(1e-4));
  }
  SUBCASE("empty positive set is an error") {
    ps::FeatureStore store = store_with_sims({0.9});
    CHECK_THROWS_AS(ps::reid_loss(kAnchor, {}, {0}, store, 0.1), ps::ConfigError);
  }
}

TEST_CASE("loss invariances and monotonicity") {
  ps::FeatureStore store = store_with_sims({0.9, 0.7, 0.5, 0.2, -0.1});

  SUBCASE("permutation invariance of C and D") {
    const double a = ps::reid_loss(kAnchor, {0, 1}, {2, 3, 4}, store, 0.1).value;
    const double b = ps::reid_loss(kAnchor, {1, 0}, {4, 2, 3}, store, 0.1).value;
    CHECK(a == doctest::Approx(b).epsilon(1e-15));
  }
  SUBCASE("loss decreases when a positive's similarity increases") {
    ps::FeatureStore low = store_with_sims({0.6, 0.5});
    ps::FeatureStore high = store_with_sims({0.8, 0.5});
    CHECK(ps::reid_loss(kAnchor, {0}, {1}, high, 0.1).value <
          ps::reid_loss(kAnchor, {0}, {1}, low, 0.1).value);
    ps::FeatureStore higher = store_with_sims({0.95, 0.5});
    CHECK(ps::reid_loss(kAnchor, {0}, {1}, higher, 0.1).value <
          ps::reid_loss(kAnchor, {0}, {1}, high, 0.1).value);
  }
}

TEST_CASE("analytic gradient matches central finite differences") {
  std::mt19937_64 rng(33);
  const int dim = 8;
  double worst = 0.0;
  for (int it = 0; it < 40; ++it) {
    ps::FeatureStore store(dim, 10);
    for (std::size_t s = 0; s < 10; ++s) store.update(s, helpers::random_unit(rng, dim));
    const std::vector<double> g = helpers::random_unit(rng, dim);
    const std::vector<std::size_t> c{0, 1, 2};
    const std::vector<std::size_t> d{3, 4, 5, 6};
    ps::LossResult r = ps::reid_loss(g, c, d, store, 0.1);

    const double h = 1e-5;
    double max_diff = 0.0, max_grad = 0.0;
    for (int k = 0; k < dim; ++k) {
      std::vector<double> gp = g, gm = g;
      gp[static_cast<std::size_t>(k)] += h;
      gm[static_cast<std::size_t>(k)] -= h;
      const double fd =
          (ps::reid_loss(gp, c, d, store, 0.1).value - ps::reid_loss(gm, c, d, store, 0.1).value) / (2 * h);
      max_diff = std::max(max_diff, std::abs(fd - r.gradient[static_cast<std::size_t>(k)]));
      max_grad = std::max(max_grad, std::abs(r.gradient[static_cast<std::size_t>(k)]));
    }
    worst = std::max(worst, max_diff / std::max(max_grad, 1e-12));
  }
  CHECK(worst <= 1e-4);
}
