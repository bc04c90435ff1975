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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qsfl/nn/mlp.hpp"

namespace qsfl {

using Image = RowMatrix<double>;

enum class TransformOp { kIdentity, kRotate90, kInvert, kZoom, kDilate, kErode };

struct TransformStep {
  TransformOp op = TransformOp::kIdentity;
  int times = 1;
};

// A composition of image operations applied left to right. Text form joins
// steps with '+', e.g. "rot180", "invert+zoom", "dilate2", "identity".
struct Transform {
  std::vector<TransformStep> steps;

  bool is_identity() const;
  std::string to_string() const;
  static Transform parse(std::string_view text);
};

// Counter-clockwise quarter turn; an exact pixel permutation.
Image rotate90(const Image& img);
// p -> 1 - p.
Image invert(const Image& img);
// 2x2 max filter: out(i, j) = max over in(i-1..i, j-1..j), in-bounds only.
Image dilate(const Image& img);
// 2x2 min filter over the same window.
Image erode(const Image& img);
// Central `fraction` crop rescaled to full size by nearest neighbour.
Image zoom(const Image& img, double fraction = 0.75);

Image apply_transform(const Transform& t, const Image& img);

// Maps labels through a permutation of [0, num_classes).
std::vector<int> apply_label_swap(std::span<const int> table, std::span<const int> labels);

// Identity table with the given pairs exchanged, in order.
std::vector<int> swap_table(int num_classes, std::span<const std::pair<int, int>> swaps);

}  // namespace qsfl
