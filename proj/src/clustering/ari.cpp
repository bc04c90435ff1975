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

#include "qsfl/clustering/ari.hpp"

#include <cstdint>
#include <map>
#include <utility>

#include "qsfl/error.hpp"

namespace qsfl {
namespace {

std::int64_t pairs(std::int64_t n) { return n * (n - 1) / 2; }

}  // namespace

double adjusted_rand_index(std::span<const int> truth, std::span<const int> pred) {
  if (truth.size() != pred.size()) throw DataError("ARI inputs differ in length");
  if (truth.size() < 2) throw DataError("ARI needs at least two items");
  std::map<std::pair<int, int>, std::int64_t> cells;
  std::map<int, std::int64_t> rows, cols;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++cells[{truth[i], pred[i]}];
    ++rows[truth[i]];
    ++cols[pred[i]];
  }
  std::int64_t index = 0, sum_rows = 0, sum_cols = 0;
  for (const auto& [_, n] : cells) index += pairs(n);
  for (const auto& [_, n] : rows) sum_rows += pairs(n);
  for (const auto& [_, n] : cols) sum_cols += pairs(n);
  const double total = static_cast<double>(pairs(static_cast<std::int64_t>(truth.size())));
  const double expected = static_cast<double>(sum_rows) * static_cast<double>(sum_cols) / total;
  const double max_index = 0.5 * static_cast<double>(sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (static_cast<double>(index) - expected) / (max_index - expected);
}

}  // namespace qsfl
