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

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iterator>

#include "qsfl/data/dataset.hpp"
#include "qsfl/error.hpp"

namespace qsfl {
namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError(path.string() + ": cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<unsigned char>& buf, std::size_t at,
                   const std::filesystem::path& path) {
  if (buf.size() < at + 4) throw IngestionError(path.string() + ": truncated header");
  return (std::uint32_t{buf[at]} << 24) | (std::uint32_t{buf[at + 1]} << 16) |
         (std::uint32_t{buf[at + 2]} << 8) | std::uint32_t{buf[at + 3]};
}

}  // namespace

void Dataset::validate() const {
  if (size() == 0) throw DataError(name + ": dataset is empty");
  if (static_cast<Index>(labels.size()) != size()) throw DataError(name + ": label count mismatch");
  if (side < 1 || images.cols() != static_cast<Index>(side) * side) {
    throw DataError(name + ": images are not square");
  }
  for (int y : labels) {
    if (y < 0 || y >= num_classes) throw DataError(name + ": label out of range");
  }
}

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 std::string name) {
  const auto img = slurp(images);
  const auto lab = slurp(labels);
  if (be32(img, 0, images) != kImageMagic) {
    throw IngestionError(images.string() + ": bad magic (expected 0x00000803)");
  }
  if (be32(lab, 0, labels) != kLabelMagic) {
    throw IngestionError(labels.string() + ": bad magic (expected 0x00000801)");
  }
  const std::size_t n = be32(img, 4, images);
  const std::size_t rows = be32(img, 8, images);
  const std::size_t cols = be32(img, 12, images);
  const std::size_t n_labels = be32(lab, 4, labels);
  if (rows != cols || rows == 0) throw IngestionError(images.string() + ": images are not square");
  if (img.size() != 16 + n * rows * cols) {
    throw IngestionError(images.string() + ": truncated or oversized payload (" +
                         std::to_string(img.size() - 16) + " bytes for " + std::to_string(n) +
                         " images)");
  }
  if (lab.size() != 8 + n_labels) {
    throw IngestionError(labels.string() + ": truncated or oversized payload");
  }
  if (n_labels != n) {
    throw IngestionError(labels.string() + ": holds " + std::to_string(n_labels) +
                         " labels but " + images.string() + " holds " + std::to_string(n) +
                         " images");
  }

  Dataset ds;
  ds.name = std::move(name);
  ds.side = static_cast<int>(rows);
  ds.images.resize(static_cast<Index>(n), static_cast<Index>(rows * cols));
  const unsigned char* px = img.data() + 16;
  for (Index i = 0; i < ds.images.size(); ++i) ds.images.data()[i] = px[i] / 255.0;
  ds.labels.assign(lab.begin() + 8, lab.end());
  ds.num_classes = n == 0 ? 0 : *std::max_element(ds.labels.begin(), ds.labels.end()) + 1;
  ds.validate();
  return ds;
}

DatasetSplits load_idx_dir(const std::filesystem::path& dir, std::string name) {
  DatasetSplits s;
  s.train = load_idx(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte", name);
  s.test = load_idx(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte", name);
  if (s.train.side != s.test.side) throw IngestionError(dir.string() + ": split image sizes differ");
  const int classes = std::max(s.train.num_classes, s.test.num_classes);
  s.train.num_classes = s.test.num_classes = classes;
  return s;
}

}  // namespace qsfl
