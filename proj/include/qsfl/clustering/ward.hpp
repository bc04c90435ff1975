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

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "qsfl/error.hpp"
#include "qsfl/nn/mlp.hpp"
#include "qsfl/runtime/assignment.hpp"

namespace qsfl {

// One agglomeration step. Leaves are 0..n-1; the node created by step s has id
// n + s. `a` < `b`.
struct Merge {
  int a = 0;
  int b = 0;
  double distance = 0.0;
  int size = 0;
};

struct Dendrogram {
  int num_points = 0;
  std::vector<Merge> merges;
};

// Agglomerative clustering with Ward linkage over Euclidean distance, via the
// Lance-Williams update on squared distances. For two singletons the linkage
// distance equals their Euclidean distance. Among equal distances the pair
// with the smaller node id wins, then the smaller partner id.
template <typename Scalar>
Dendrogram ward_linkage(const RowMatrix<Scalar>& points) {
  const int n = static_cast<int>(points.rows());
  if (n < 2) throw ConfigError("Ward linkage needs at least two points");
  const int total = 2 * n - 1;
  std::vector<double> d2(static_cast<std::size_t>(total) * total, 0.0);
  auto at = [&](int i, int j) -> double& { return d2[static_cast<std::size_t>(i) * total + j]; };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      at(i, j) = at(j, i) =
          static_cast<double>((points.row(i) - points.row(j)).squaredNorm());
    }
  }
  std::vector<int> size(total, 1);
  std::vector<int> active(n);
  std::iota(active.begin(), active.end(), 0);

  Dendrogram out;
  out.num_points = n;
  for (int step = 0; step < n - 1; ++step) {
    int best_a = -1, best_b = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < active.size(); ++p) {
      for (std::size_t q = p + 1; q < active.size(); ++q) {
        const double v = at(active[p], active[q]);
        if (v < best) {
          best = v;
          best_a = active[p];
          best_b = active[q];
        }
      }
    }
    const int node = n + step;
    size[node] = size[best_a] + size[best_b];
    for (int k : active) {
      if (k == best_a || k == best_b) continue;
      const double na = size[best_a], nb = size[best_b], nk = size[k];
      const double v = ((na + nk) * at(best_a, k) + (nb + nk) * at(best_b, k) - nk * best) /
                       (na + nb + nk);
      at(node, k) = at(k, node) = std::max(v, 0.0);
    }
    std::erase_if(active, [&](int k) { return k == best_a || k == best_b; });
    active.push_back(node);
    out.merges.push_back({best_a, best_b, std::sqrt(best), size[node]});
  }
  return out;
}

// Applies the first n - K merges; clusters are labeled in order of their
// smallest member.
ClusterAssignment cut(const Dendrogram& tree, int num_clusters);

}  // namespace qsfl
