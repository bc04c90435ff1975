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

#include "qsfl/data/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qsfl/error.hpp"

namespace qsfl {
namespace {

void require_square(const Image& img) {
  if (img.rows() != img.cols()) throw ConfigError("image transforms need square images");
}

std::string_view op_name(TransformOp op) {
  switch (op) {
    case TransformOp::kIdentity: return "identity";
    case TransformOp::kRotate90: return "rot";
    case TransformOp::kInvert: return "invert";
    case TransformOp::kZoom: return "zoom";
    case TransformOp::kDilate: return "dilate";
    case TransformOp::kErode: return "erode";
  }
  return "?";
}

TransformStep parse_step(std::string_view s) {
  auto count_suffix = [&](std::string_view prefix) -> int {
    std::string_view rest = s.substr(prefix.size());
    if (rest.empty()) return 1;
    int v = 0;
    for (char c : rest) {
      if (c < '0' || c > '9') throw ConfigError("unknown transform descriptor '" + std::string(s) + "'");
      v = v * 10 + (c - '0');
    }
    return v;
  };
  if (s == "identity" || s == "rot0") return {TransformOp::kIdentity, 1};
  if (s.starts_with("rot")) {
    const int deg = count_suffix("rot");
    if (deg % 90 != 0) throw ConfigError("rotation must be a multiple of 90 degrees: " + std::string(s));
    return {TransformOp::kRotate90, (deg / 90) % 4};
  }
  if (s == "invert") return {TransformOp::kInvert, 1};
  if (s == "zoom") return {TransformOp::kZoom, 1};
  if (s.starts_with("dilate")) return {TransformOp::kDilate, count_suffix("dilate")};
  if (s.starts_with("erode")) return {TransformOp::kErode, count_suffix("erode")};
  throw ConfigError("unknown transform descriptor '" + std::string(s) + "'");
}

template <bool kMax>
Image morph(const Image& img) {
  require_square(img);
  const Index n = img.rows();
  Image out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      double v = img(i, j);
      for (Index di = 0; di <= 1; ++di) {
        for (Index dj = 0; dj <= 1; ++dj) {
          if (i - di < 0 || j - dj < 0) continue;
          v = kMax ? std::max(v, img(i - di, j - dj)) : std::min(v, img(i - di, j - dj));
        }
      }
      out(i, j) = v;
    }
  }
  return out;
}

}  // namespace

bool Transform::is_identity() const {
  return std::all_of(steps.begin(), steps.end(), [](const TransformStep& s) {
    return s.op == TransformOp::kIdentity || s.times == 0;
  });
}

std::string Transform::to_string() const {
  if (is_identity()) return "identity";
  std::string out;
  for (const auto& s : steps) {
    if (s.op == TransformOp::kIdentity || s.times == 0) continue;
    if (!out.empty()) out += '+';
    out += op_name(s.op);
    if (s.op == TransformOp::kRotate90) {
      out += std::to_string(90 * s.times);
    } else if (s.times != 1) {
      out += std::to_string(s.times);
    }
  }
  return out;
}

Transform Transform::parse(std::string_view text) {
  Transform t;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('+', start), text.size());
    t.steps.push_back(parse_step(text.substr(start, end - start)));
    start = end + 1;
  }
  return t;
}

Image rotate90(const Image& img) {
  require_square(img);
  const Index n = img.rows();
  Image out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) out(i, j) = img(j, n - 1 - i);
  }
  return out;
}

Image invert(const Image& img) {
  require_square(img);
  return (1.0 - img.array()).matrix();
}

Image dilate(const Image& img) { return morph<true>(img); }
Image erode(const Image& img) { return morph<false>(img); }

Image zoom(const Image& img, double fraction) {
  require_square(img);
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("zoom fraction must be in (0, 1]");
  const Index n = img.rows();
  const Index crop = std::max<Index>(1, static_cast<Index>(std::lround(fraction * n)));
  const Index off = (n - crop) / 2;
  Image out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) out(i, j) = img(off + i * crop / n, off + j * crop / n);
  }
  return out;
}

Image apply_transform(const Transform& t, const Image& img) {
  require_square(img);
  Image out = img;
  for (const auto& step : t.steps) {
    for (int k = 0; k < step.times; ++k) {
      switch (step.op) {
        case TransformOp::kIdentity: break;
        case TransformOp::kRotate90: out = rotate90(out); break;
        case TransformOp::kInvert: out = invert(out); break;
        case TransformOp::kZoom: out = zoom(out); break;
        case TransformOp::kDilate: out = dilate(out); break;
        case TransformOp::kErode: out = erode(out); break;
      }
    }
  }
  return out;
}

std::vector<int> apply_label_swap(std::span<const int> table, std::span<const int> labels) {
  std::vector<int> seen(table.size(), 0);
  for (int v : table) {
    if (v < 0 || v >= static_cast<int>(table.size()) || seen[v]++) {
      throw ConfigError("label swap table is not a permutation");
    }
  }
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= static_cast<int>(table.size())) {
      throw DataError("label " + std::to_string(labels[i]) + " outside the swap table");
    }
    out[i] = table[labels[i]];
  }
  return out;
}

std::vector<int> swap_table(int num_classes, std::span<const std::pair<int, int>> swaps) {
  std::vector<int> t(num_classes);
  std::iota(t.begin(), t.end(), 0);
  for (auto [a, b] : swaps) {
    if (a < 0 || b < 0 || a >= num_classes || b >= num_classes) {
      throw ConfigError("label swap refers to a class outside [0, num_classes)");
    }
    std::swap(t[a], t[b]);
  }
  return t;
}

}  // namespace qsfl
