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

#include "qsfl/runtime/assignment.hpp"

#include <string>
#include <unordered_map>

#include "qsfl/error.hpp"

namespace qsfl {

void ClusterAssignment::validate() const {
  if (num_clusters < 1) throw ConfigError("assignment needs at least one cluster");
  for (int c : membership) {
    if (c < 0 || c >= num_clusters) {
      throw ConfigError("cluster id " + std::to_string(c) + " outside [0, " +
                        std::to_string(num_clusters) + ")");
    }
  }
}

std::vector<std::vector<int>> ClusterAssignment::members() const {
  std::vector<std::vector<int>> out(num_clusters);
  for (int i = 0; i < num_clients(); ++i) out[membership[i]].push_back(i);
  return out;
}

int ClusterAssignment::num_nonempty() const {
  int n = 0;
  for (const auto& m : members()) n += m.empty() ? 0 : 1;
  return n;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::unordered_map<int, int> fwd, bwd;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [f, f_new] = fwd.emplace(a[i], b[i]);
    auto [g, g_new] = bwd.emplace(b[i], a[i]);
    if (f->second != b[i] || g->second != a[i]) return false;
  }
  return true;
}

std::vector<int> canonical_labels(const std::vector<int>& membership) {
  std::unordered_map<int, int> relabel;
  std::vector<int> out(membership.size());
  for (std::size_t i = 0; i < membership.size(); ++i) {
    auto [it, inserted] = relabel.emplace(membership[i], static_cast<int>(relabel.size()));
    out[i] = it->second;
  }
  return out;
}

}  // namespace qsfl
