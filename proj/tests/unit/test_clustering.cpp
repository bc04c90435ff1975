// Copyright 2026 The qsfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <doctest.h>

#include <cmath>
#include <vector>

#include "qsfl/clustering/ari.hpp"
#include "qsfl/clustering/edc.hpp"
#include "qsfl/clustering/kmeans.hpp"
#include "qsfl/clustering/ward.hpp"
#include "qsfl/random.hpp"
#include "qsfl/runtime/assignment.hpp"
#include "qsfl/verify/oracles.hpp"

using namespace qsfl;

namespace {

double ari(std::vector<int> a, std::vector<int> b) { return adjusted_rand_index(a, b); }

RowMatrix<double> points(std::initializer_list<std::initializer_list<double>> rows) {
  RowMatrix<double> m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

RowMatrix<double> blobs(int per_blob, int num_blobs, double spread, std::uint64_t seed,
                        std::vector<int>* truth) {
  Rng rng(seed);
  RowMatrix<double> p(per_blob * num_blobs, 3);
  for (int b = 0; b < num_blobs; ++b) {
    for (int i = 0; i < per_blob; ++i) {
      const Index row = b * per_blob + i;
      for (Index c = 0; c < 3; ++c) p(row, c) = spread * (uniform01(rng) - 0.5);
      p(row, b % 3) += 10.0 * (1 + b / 3);
      truth->push_back(b);
    }
  }
  return p;
}

}  // namespace

TEST_CASE("ari: identical, relabeled and hand-computed cases") {
  CHECK(ari({0, 0, 1, 1}, {0, 0, 1, 1}) == doctest::Approx(1.0));
  CHECK(ari({0, 0, 1, 1}, {1, 1, 0, 0}) == doctest::Approx(1.0));
  // Contingency rows {2,0},{1,1}: index 1, expected 0.5, max 1.5.
  CHECK(ari({0, 0, 1, 1}, {0, 0, 0, 1}) == doctest::Approx(0.0).epsilon(1e-15));
  // Index 0, expected 6 * 3 / 15, max 4.5.
  CHECK(ari({0, 0, 0, 1, 1, 1}, {0, 1, 2, 0, 1, 2}) == doctest::Approx(-4.0 / 11.0));
  CHECK(ari({0, 1, 2}, {0, 1, 2}) == doctest::Approx(1.0));
  CHECK(ari({0, 0, 0}, {0, 0, 0}) == doctest::Approx(1.0));
}

TEST_CASE("ari: matches pair counting on random labelings") {
  Rng rng(12);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(uniform_index(rng, 30));
    std::vector<int> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = static_cast<int>(uniform_index(rng, 4));
      b[i] = static_cast<int>(uniform_index(rng, 5));
    }
    CHECK(std::abs(adjusted_rand_index(a, b) - oracle::ari_pairs(a, b)) < 1e-12);
    CHECK(std::abs(adjusted_rand_index(a, b) - adjusted_rand_index(b, a)) < 1e-15);
  }
}

TEST_CASE("ari: length mismatch is rejected") {
  CHECK_THROWS(ari({0, 1}, {0}));
}

TEST_CASE("ward: two points merge at their distance") {
  const auto tree = ward_linkage(points({{0, 0}, {3, 4}}));
  REQUIRE(tree.merges.size() == 1);
  CHECK(tree.merges[0].distance == doctest::Approx(5.0));
  CHECK(tree.merges[0].size == 2);
}

TEST_CASE("ward: {0,1,10,11} splits into the two pairs") {
  const auto p = points({{0}, {1}, {10}, {11}});
  const auto tree = ward_linkage(p);
  CHECK(tree.merges[0].distance == doctest::Approx(1.0));
  CHECK(tree.merges[1].distance == doctest::Approx(1.0));
  // Pairs centred at 0.5 and 10.5: sqrt(2 * 2*2/4 * 100) = sqrt(200).
  CHECK(tree.merges[2].distance == doctest::Approx(std::sqrt(200.0)));
  CHECK(same_partition(cut(tree, 2).membership, std::vector<int>{0, 0, 1, 1}));
  CHECK(cut(tree, 1).num_nonempty() == 1);
  CHECK(same_partition(cut(tree, 4).membership, std::vector<int>{0, 1, 2, 3}));
  CHECK_THROWS_AS(cut(tree, 5), ConfigError);
}

TEST_CASE("ward: agrees with exhaustive greedy merging, heights monotone") {
  Rng rng(5);
  for (int t = 0; t < 30; ++t) {
    RowMatrix<double> p(6, 2);
    for (Index i = 0; i < p.size(); ++i) p.data()[i] = uniform01(rng) * 10.0;
    const auto tree = ward_linkage(p);
    const auto steps = oracle::ward_greedy(p);
    REQUIRE(steps.size() == tree.merges.size());
    for (std::size_t s = 0; s < steps.size(); ++s) {
      CHECK(std::abs(tree.merges[s].distance - steps[s].height) < 1e-9);
      if (s > 0) CHECK(tree.merges[s].distance >= tree.merges[s - 1].distance - 1e-12);
      const int k = 6 - static_cast<int>(s) - 1;
      CHECK(same_partition(cut(tree, k).membership, steps[s].labels));
    }
  }
}

TEST_CASE("ward: fewer than two points is an error") {
  CHECK_THROWS_AS(ward_linkage(points({{1, 2}})), ConfigError);
}

TEST_CASE("kmeans: K = 1 and K = n") {
  const auto p = points({{0, 0}, {1, 0}, {5, 5}, {9, 1}});
  const auto one = kmeans(p, 1, 3);
  CHECK(one.assignment.membership == std::vector<int>{0, 0, 0, 0});
  const auto all = kmeans(p, 4, 3);
  CHECK(all.inertia.back() == 0.0);
  CHECK(all.assignment.num_nonempty() == 4);
  CHECK_THROWS_AS(kmeans(p, 5, 3), ConfigError);
  CHECK_THROWS_AS(kmeans(p, 0, 3), ConfigError);
}

TEST_CASE("kmeans: well separated blobs recovered on every seed") {
  std::vector<int> truth;
  const auto p = blobs(8, 4, 1.0, 99, &truth);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto r = kmeans(p, 4, s);
    CHECK(adjusted_rand_index(truth, r.assignment.membership) == doctest::Approx(1.0));
  }
}

TEST_CASE("kmeans: inertia never increases and runs are seeded") {
  std::vector<int> truth;
  const auto p = blobs(10, 5, 12.0, 7, &truth);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto r = kmeans(p, 5, s);
    for (std::size_t i = 1; i < r.inertia.size(); ++i) {
      CHECK(r.inertia[i] <= r.inertia[i - 1] + 1e-9);
    }
    CHECK(kmeans(p, 5, s).assignment == r.assignment);
  }
}

TEST_CASE("kmeans: fewer distinct points than K leaves a cluster empty") {
  const auto p = points({{1, 1}, {1, 1}, {1, 1}, {2, 2}});
  const auto r = kmeans(p, 3, 0);
  CHECK(r.assignment.num_clusters == 3);
  CHECK(r.assignment.num_nonempty() == 2);
  CHECK(r.inertia.back() == 0.0);
}

TEST_CASE("edc: opposite updates land at 0 and 2") {
  const auto u = points({{1, 2, 3}, {-1, -2, -3}});
  const auto f = edc_features(u, 1);
  const double a = f.features(0, 0), b = f.features(1, 0);
  CHECK(std::min(a, b) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::max(a, b) == doctest::Approx(2.0));
}

TEST_CASE("edc: identical updates share features") {
  const auto u = points({{1, 0, 2}, {1, 0, 2}, {1, 0, 2}});
  const auto f = edc_features(u, 2);
  for (Index i = 1; i < 3; ++i) CHECK(f.features.row(i).isApprox(f.features.row(0)));
  for (Index i = 0; i < f.features.size(); ++i) {
    CHECK(f.features.data()[i] >= 0.0);
    CHECK(f.features.data()[i] <= 2.0);
  }
}

TEST_CASE("edc: two orthogonal pencils separate under kmeans") {
  RowMatrix<double> u(6, 4);
  u.setZero();
  for (int i = 0; i < 3; ++i) {
    u(i, 0) = 1.0 + 0.1 * i;
    u(i, 1) = 0.05 * i;
    u(i + 3, 2) = 2.0 + 0.1 * i;
    u(i + 3, 3) = -0.05 * i;
  }
  const auto f = edc_features(u, 2);
  const auto r = kmeans(f.features, 2, 1);
  CHECK(same_partition(r.assignment.membership, std::vector<int>{0, 0, 0, 1, 1, 1}));
}

TEST_CASE("edc: zero updates are flagged and direction count checked") {
  const auto u = points({{0, 0}, {1, 1}});
  const auto f = edc_features(u, 1);
  CHECK(f.zero_norm == std::vector<int>{0});
  CHECK_THROWS_AS(edc_features(u, 3), ConfigError);
}
