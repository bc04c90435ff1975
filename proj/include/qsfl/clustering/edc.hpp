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

#include "qsfl/nn/mlp.hpp"

namespace qsfl {

struct EdcFeatures {
  RowMatrix<double> features;   // n x m, entries in [0, 2]
  std::vector<int> zero_norm;   // rows whose update vector was zero
};

// Cosine-dissimilarity features of client updates (one update per row)
// against the top-m singular directions of the update matrix:
// feature(i, j) = 1 - cos(update_i, direction_j). Clustering then uses
// Euclidean distance over these rows.
//
// Directions come from the n x n Gram matrix, which keeps the cost linear in
// the parameter count. Each direction's sign makes its largest-magnitude
// left-singular component positive (lowest index on ties). Zero updates and
// zero singular values produce the orthogonal value 1.
EdcFeatures edc_features(const RowMatrix<double>& updates, int num_directions);

}  // namespace qsfl
