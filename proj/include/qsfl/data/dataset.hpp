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

#include <filesystem>
#include <string>
#include <vector>

#include "qsfl/nn/mlp.hpp"

namespace qsfl {

// Square grayscale images, one flattened image per row, pixels in [0, 1].
struct Dataset {
  std::string name;
  RowMatrix<double> images;
  std::vector<int> labels;
  int num_classes = 0;
  int side = 0;

  Index size() const { return images.rows(); }
  void validate() const;
};

struct DatasetSplits {
  Dataset train;
  Dataset test;
};

// Reads an IDX image file (magic 0x00000803) and label file (0x00000801).
// Pixel bytes are scaled by 1/255; num_classes is max label + 1.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 std::string name = "idx");

// Loads `<dir>/train-{images-idx3,labels-idx1}-ubyte` and the matching `t10k-`
// pair. Both splits share num_classes.
DatasetSplits load_idx_dir(const std::filesystem::path& dir, std::string name = "mnist");

}  // namespace qsfl
