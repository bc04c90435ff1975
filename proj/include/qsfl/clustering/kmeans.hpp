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

#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qsfl/error.hpp"
#include "qsfl/nn/mlp.hpp"
#include "qsfl/random.hpp"
#include "qsfl/runtime/assignment.hpp"

namespace qsfl {

template <typename Scalar>
struct KMeansResult {
  ClusterAssignment assignment;
  RowMatrix<Scalar> centroids;
  std::vector<double> inertia;  // after each assignment step
  int iterations = 0;
};

namespace detail {

template <typename Scalar>
double nearest(const RowMatrix<Scalar>& points, Index i, const RowMatrix<Scalar>& centroids,
               Index count, int* which) {
  double best = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < count; ++k) {
    const double d = static_cast<double>((points.row(i) - centroids.row(k)).squaredNorm());
    if (d < best) {
      best = d;
      *which = static_cast<int>(k);
    }
  }
  return best;
}

}  // namespace detail

// Lloyd's algorithm from k-means++ seeds. Nearest-centroid ties go to the
// lowest centroid index. A centroid left without points is moved onto the
// point farthest from its own centroid. Stops when assignments repeat or
// after max_iter assignment steps.
template <typename Scalar>
KMeansResult<Scalar> kmeans(const RowMatrix<Scalar>& points, int num_clusters, std::uint64_t seed,
                            int max_iter = 100) {
  const Index n = points.rows();
  if (num_clusters < 1 || num_clusters > n) {
    throw ConfigError("k-means needs 1 <= K <= n (K = " + std::to_string(num_clusters) +
                      ", n = " + std::to_string(n) + ")");
  }
  if (max_iter < 1) throw ConfigError("k-means max_iter must be >= 1");
  const Index K = num_clusters;
  Rng rng(seed);

  KMeansResult<Scalar> res;
  res.centroids.resize(K, points.cols());
  std::vector<char> chosen(n, 0);
  Index first = static_cast<Index>(uniform_index(rng, n));
  res.centroids.row(0) = points.row(first);
  chosen[first] = 1;
  std::vector<double> d2(n);
  for (Index k = 1; k < K; ++k) {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      int w = 0;
      d2[i] = chosen[i] ? 0.0 : detail::nearest(points, i, res.centroids, k, &w);
      total += d2[i];
    }
    Index pick = -1;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double acc = 0.0;
      for (Index i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        acc += d2[i];
        pick = i;
        if (acc > target) break;
      }
    } else {
      std::vector<Index> free;
      for (Index i = 0; i < n; ++i) {
        if (!chosen[i]) free.push_back(i);
      }
      pick = free[uniform_index(rng, free.size())];
    }
    chosen[pick] = 1;
    res.centroids.row(k) = points.row(pick);
  }

  std::vector<int> assign(n, 0), prev;
  std::vector<double> dist(n);
  for (int it = 0; it < max_iter; ++it) {
    double inertia = 0.0;
    for (Index i = 0; i < n; ++i) {
      dist[i] = detail::nearest(points, i, res.centroids, K, &assign[i]);
      inertia += dist[i];
    }
    res.inertia.push_back(inertia);
    res.iterations = it + 1;
    if (assign == prev) break;
    prev = assign;

    std::vector<Index> counts(K, 0);
    for (int a : assign) ++counts[a];
    for (Index k = 0; k < K; ++k) {
      if (counts[k] > 0) continue;
      Index far = -1;
      for (Index i = 0; i < n; ++i) {
        if (counts[assign[i]] > 1 && (far < 0 || dist[i] > dist[far])) far = i;
      }
      if (far < 0) break;
      --counts[assign[far]];
      assign[far] = static_cast<int>(k);
      counts[k] = 1;
      dist[far] = 0.0;
    }
    res.centroids.setZero();
    for (Index i = 0; i < n; ++i) res.centroids.row(assign[i]) += points.row(i);
    for (Index k = 0; k < K; ++k) {
      if (counts[k] > 0) res.centroids.row(k) /= static_cast<Scalar>(counts[k]);
    }
  }
  res.assignment = ClusterAssignment(assign, num_clusters);
  return res;
}

// Rows of `points` are flattened models; convenience for weight clustering.
RowMatrix<double> stack_models(std::span<const Model> models);

}  // namespace qsfl
