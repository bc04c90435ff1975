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

#include "qsfl/experiment/grid.hpp"

#include <algorithm>
#include <string>
#include <tuple>

namespace qsfl {

std::vector<Cell> expand_grid(const ExperimentConfig& cfg) {
  cfg.validate();
  using Key = std::tuple<std::string, std::string, std::string, int, std::string, std::uint64_t>;
  std::vector<std::pair<Key, Cell>> keyed;
  for (const auto& d : cfg.datasets) {
    for (auto het : cfg.heterogeneity) {
      for (auto qs : cfg.qs) {
        for (int k : cfg.clusters) {
          for (auto algo : cfg.algorithms) {
            for (auto seed : cfg.seeds) {
              Cell c{cfg.base, d.dir};
              c.spec.dataset = d.name;
              c.spec.heterogeneity = het;
              c.spec.qs = qs;
              c.spec.algo.num_clusters = k;
              c.spec.algo.algorithm = algo;
              c.spec.algo.seed = seed + cfg.seed_offset;
              Key key{d.name,
                      std::string(to_string(het)),
                      std::string(to_string(qs)),
                      k,
                      std::string(to_string(algo)),
                      c.spec.algo.seed};
              keyed.emplace_back(std::move(key), std::move(c));
            }
          }
        }
      }
    }
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  keyed.erase(std::unique(keyed.begin(), keyed.end(),
                          [](const auto& a, const auto& b) { return a.first == b.first; }),
              keyed.end());
  std::vector<Cell> out;
  out.reserve(keyed.size());
  for (auto& [key, cell] : keyed) out.push_back(std::move(cell));
  return out;
}

}  // namespace qsfl
