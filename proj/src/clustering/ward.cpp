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

#include "qsfl/clustering/ward.hpp"

namespace qsfl {

ClusterAssignment cut(const Dendrogram& tree, int num_clusters) {
  const int n = tree.num_points;
  if (num_clusters < 1 || num_clusters > n) {
    throw ConfigError("cannot cut " + std::to_string(n) + " points into " +
                      std::to_string(num_clusters) + " clusters");
  }
  std::vector<int> parent(2 * n - 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int s = 0; s < n - num_clusters; ++s) {
    const auto& m = tree.merges[s];
    parent[find(m.a)] = n + s;
    parent[find(m.b)] = n + s;
  }
  std::vector<int> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = find(i);
  return {canonical_labels(roots), num_clusters};
}

template Dendrogram ward_linkage<double>(const RowMatrix<double>&);

}  // namespace qsfl
