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

#include <vector>

namespace qsfl {

// Client index -> cluster id. Clusters may be empty.
struct ClusterAssignment {
  std::vector<int> membership;
  int num_clusters = 0;

  ClusterAssignment() = default;
  ClusterAssignment(std::vector<int> m, int k) : membership(std::move(m)), num_clusters(k) {}

  static ClusterAssignment single(int num_clients) {
    return {std::vector<int>(num_clients, 0), 1};
  }

  int num_clients() const { return static_cast<int>(membership.size()); }
  void validate() const;
  // Ascending client ids per cluster.
  std::vector<std::vector<int>> members() const;
  int num_nonempty() const;

  friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;
};

// True when both assignments group clients identically, ignoring labels.
bool same_partition(const std::vector<int>& a, const std::vector<int>& b);
inline bool same_partition(const ClusterAssignment& a, const ClusterAssignment& b) {
  return same_partition(a.membership, b.membership);
}

// Relabels clusters in order of first appearance (smallest client id first).
std::vector<int> canonical_labels(const std::vector<int>& membership);

}  // namespace qsfl
