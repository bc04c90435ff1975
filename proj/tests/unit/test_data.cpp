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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>

#include <doctest.h>

#include "qsfl/data/dataset.hpp"
#include "qsfl/data/partition.hpp"
#include "qsfl/data/shard_cache.hpp"
#include "qsfl/data/transforms.hpp"

using namespace qsfl;
namespace fs = std::filesystem;

namespace {

Dataset synthetic(int per_label, int side, std::uint64_t seed) {
  Dataset d;
  d.name = "synthetic";
  d.side = side;
  d.num_classes = 10;
  d.images.resize(per_label * 10, side * side);
  Rng rng(seed);
  for (Index i = 0; i < d.images.size(); ++i) d.images.data()[i] = uniform01(rng);
  for (int i = 0; i < per_label * 10; ++i) d.labels.push_back(i % 10);
  return d;
}

DatasetSplits synthetic_splits() { return {synthetic(250, 4, 1), synthetic(20, 4, 2)}; }

Image random_image(int n, std::uint64_t seed) {
  Image img(n, n);
  Rng rng(seed);
  for (Index i = 0; i < img.size(); ++i) img.data()[i] = uniform01(rng);
  return img;
}

void put_be32(std::ofstream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("qsfl-test-" + std::to_string(std::rand()) + "-" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// 2 images of 2x2 pixels, labels {3, 7}.
void write_fixture(const fs::path& images, const fs::path& labels, int label_count = 2,
                   bool truncate = false) {
  std::ofstream im(images, std::ios::binary);
  put_be32(im, 0x00000803);
  put_be32(im, 2);
  put_be32(im, 2);
  put_be32(im, 2);
  const unsigned char px[8] = {0, 255, 51, 102, 255, 0, 0, 17};
  im.write(reinterpret_cast<const char*>(px), truncate ? 5 : 8);
  std::ofstream lb(labels, std::ios::binary);
  put_be32(lb, 0x00000801);
  put_be32(lb, static_cast<std::uint32_t>(label_count));
  const unsigned char y[2] = {3, 7};
  lb.write(reinterpret_cast<const char*>(y), label_count);
}

}  // namespace

TEST_CASE("load_idx: fixture pixels and labels recovered") {
  TempDir tmp;
  write_fixture(tmp.path / "img", tmp.path / "lbl");
  const Dataset d = load_idx(tmp.path / "img", tmp.path / "lbl");
  CHECK(d.size() == 2);
  CHECK(d.side == 2);
  CHECK(d.num_classes == 8);
  CHECK(d.labels == std::vector<int>{3, 7});
  CHECK(d.images(0, 1) == 1.0);
  CHECK(d.images(0, 2) == 51.0 / 255.0);
  CHECK(d.images(1, 3) == 17.0 / 255.0);
}

TEST_CASE("load_idx: count mismatch, truncation and bad magic name the file") {
  TempDir tmp;
  write_fixture(tmp.path / "img", tmp.path / "short-labels", 1);
  try {
    load_idx(tmp.path / "img", tmp.path / "short-labels");
    FAIL("expected an ingestion error");
  } catch (const IngestionError& e) {
    CHECK(std::string(e.what()).find("short-labels") != std::string::npos);
  }
  write_fixture(tmp.path / "cut-images", tmp.path / "lbl", 2, true);
  CHECK_THROWS_AS(load_idx(tmp.path / "cut-images", tmp.path / "lbl"), IngestionError);
  {
    std::ofstream bad(tmp.path / "bad", std::ios::binary);
    put_be32(bad, 0x12345678);
  }
  CHECK_THROWS_AS(load_idx(tmp.path / "bad", tmp.path / "lbl"), IngestionError);
  CHECK_THROWS_AS(load_idx(tmp.path / "missing", tmp.path / "lbl"), DataError);
}

TEST_CASE("load_idx: full MNIST counts when available") {
  const char* dir = std::getenv("QSFL_FULL_MNIST_DIR");
  if (dir == nullptr || !fs::exists(fs::path(dir) / "train-images-idx3-ubyte")) {
    MESSAGE("full MNIST not present; set QSFL_FULL_MNIST_DIR to check the 60000-image split");
    return;
  }
  const auto splits = load_idx_dir(dir);
  CHECK(splits.train.size() == 60000);
  CHECK(splits.train.side == 28);
  CHECK(splits.train.num_classes == 10);
}

TEST_CASE("load_idx_dir: bundled subset is real 28x28 digits") {
  const auto splits = load_idx_dir(QSFL_TEST_DATA_DIR);
  CHECK(splits.train.side == 28);
  CHECK(splits.train.num_classes == 10);
  CHECK(splits.test.size() > 1000);
  CHECK(splits.train.images.maxCoeff() <= 1.0);
  CHECK(splits.train.images.minCoeff() >= 0.0);
}

TEST_CASE("transforms: rotation group and involutions") {
  const Image img = random_image(5, 3);
  CHECK(rotate90(rotate90(rotate90(rotate90(img)))) == img);
  CHECK_FALSE(rotate90(img) == img);
  CHECK(invert(invert(img)).isApprox(img, 0.0));
  CHECK(apply_transform(Transform::parse("rot180"), img) == rotate90(rotate90(img)));
  CHECK(apply_transform(Transform::parse("identity"), img) == img);
}

TEST_CASE("transforms: rotate90 is counter-clockwise") {
  Image img = Image::Zero(3, 3);
  img(0, 2) = 1.0;  // top-right corner
  const Image r = rotate90(img);
  CHECK(r(0, 0) == 1.0);  // moves to top-left
  CHECK(r.sum() == 1.0);
}

TEST_CASE("transforms: dilation of a single white pixel") {
  Image img = Image::Zero(4, 4);
  img(1, 2) = 1.0;
  const Image d = dilate(img);
  // out(i, j) = max of in(i-1..i, j-1..j): the pixel reaches (1..2, 2..3).
  Image expect = Image::Zero(4, 4);
  expect(1, 2) = expect(1, 3) = expect(2, 2) = expect(2, 3) = 1.0;
  CHECK(d == expect);
  CHECK(erode(d)(2, 3) == 1.0);
  CHECK(erode(img).sum() == 0.0);
}

TEST_CASE("transforms: zoom keeps the centre and unknown names fail") {
  Image img = Image::Zero(8, 8);
  img(3, 3) = img(3, 4) = img(4, 3) = img(4, 4) = 1.0;
  const Image z = zoom(img);
  CHECK(z.rows() == 8);
  CHECK(z.sum() >= img.sum());
  CHECK(z(0, 0) == 0.0);
  CHECK_THROWS_AS(Transform::parse("shear"), ConfigError);
  CHECK(Transform::parse("invert+zoom").to_string() == "invert+zoom");
}

TEST_CASE("label swaps") {
  const std::vector<int> labels{0, 1, 2, 3, 4};
  std::vector<int> id(10);
  std::iota(id.begin(), id.end(), 0);
  CHECK(apply_label_swap(id, labels) == labels);
  const std::vector<std::pair<int, int>> one{{0, 1}};
  const auto t01 = swap_table(10, one);
  CHECK(apply_label_swap(t01, apply_label_swap(t01, labels)) == labels);
  const std::vector<std::pair<int, int>> two{{0, 1}, {2, 3}};
  CHECK(apply_label_swap(swap_table(10, two), labels) == std::vector<int>{1, 0, 3, 2, 4});
  const std::vector<int> not_perm{0, 0, 2};
  CHECK_THROWS_AS(apply_label_swap(not_perm, std::vector<int>{0, 1}), ConfigError);
}

TEST_CASE("presets: class 0 untouched, 4 classes each") {
  for (auto kind : {HeterogeneityKind::kConceptShiftFeatures, HeterogeneityKind::kConceptShiftLabels,
                    HeterogeneityKind::kFeatureDistributionSkew}) {
    const auto spec = HeterogeneitySpec::preset(kind);
    CHECK(spec.num_classes_het() == 4);
    CHECK(spec.classes.front().features.is_identity());
    CHECK_NOTHROW(spec.validate(10));
  }
  const auto med = HeterogeneitySpec::preset(HeterogeneityKind::kConceptShiftFeatures, 4, 10, "medical");
  CHECK(med.classes[3].features.to_string() == "invert+zoom");
}

TEST_CASE("plan: 100-client non-QS, QS1, QS2") {
  QsSpec qs;
  auto plan = samples_per_label_plan(qs, 100, 4, 0);
  CHECK(std::all_of(plan.begin(), plan.end(), [](int s) { return s == 50; }));

  qs.kind = QsKind::kQs1;
  plan = samples_per_label_plan(qs, 100, 4, 0);
  for (int c = 0; c < 4; ++c) {
    std::map<int, int> count;
    for (int i = c * 25; i < (c + 1) * 25; ++i) ++count[plan[i]];
    for (int g : {5, 20, 100, 200}) CHECK(count[g] >= 6);
  }

  qs.kind = QsKind::kQs2;
  plan = samples_per_label_plan(qs, 100, 4, 0);
  for (int i = 0; i < 100; ++i) CHECK(plan[i] == std::vector<int>{5, 20, 100, 200}[i / 25]);
  // Class totals follow 5:20:100:200.
  long totals[4] = {0, 0, 0, 0};
  for (int i = 0; i < 100; ++i) totals[i / 25] += plan[i] * 10;
  CHECK(totals[1] == 4 * totals[0]);
  CHECK(totals[3] == 40 * totals[0]);

  CHECK_THROWS_AS(samples_per_label_plan(qs, 10, 4, 0), ConfigError);
}

TEST_CASE("partition: stratified, class blocks, shared test sets, deterministic") {
  const auto splits = synthetic_splits();
  QsSpec qs;
  qs.kind = QsKind::kQs1;
  qs.group_sizes = {2, 5};
  const auto het = HeterogeneitySpec::preset(HeterogeneityKind::kConceptShiftFeatures);
  const auto shards = partition(splits, het, qs, 8, 42);
  REQUIRE(shards.size() == 8);
  for (const auto& s : shards) {
    CHECK(s.het_class == s.client_id / 2);
    std::vector<int> count(10, 0);
    for (int y : s.train.labels) ++count[y];
    for (int c : count) CHECK(c == s.samples_per_label);
    CHECK(s.num_samples() == s.samples_per_label * 10);
  }
  CHECK(shards[0].test == shards[1].test);
  CHECK(shards[0].test->size() == 200 / 4);
  CHECK_FALSE(shards[0].test->features.isApprox(shards[2].test->features));

  const auto again = partition(splits, het, qs, 8, 42);
  for (std::size_t i = 0; i < shards.size(); ++i) {
    CHECK(shards[i].train.features == again[i].train.features);
    CHECK(shards[i].train.labels == again[i].train.labels);
  }
  const auto other = partition(splits, het, qs, 8, 43);
  CHECK_FALSE(other[0].train.features == shards[0].train.features);
}

TEST_CASE("partition: transforms touch only their side") {
  const auto splits = synthetic_splits();
  QsSpec qs;
  qs.samples_per_label_nonqs = 3;
  const auto feat = partition(splits, HeterogeneitySpec::preset(HeterogeneityKind::kConceptShiftFeatures), qs, 4, 1);
  const auto lab = partition(splits, HeterogeneitySpec::preset(HeterogeneityKind::kConceptShiftLabels), qs, 4, 1);
  for (std::size_t i = 0; i < 4; ++i) {
    // Same seed, same draws: feature shift keeps labels, label shift keeps features.
    std::vector<int> sorted_f = feat[i].train.labels, sorted_l = lab[i].train.labels;
    std::sort(sorted_f.begin(), sorted_f.end());
    std::vector<int> expect;
    for (int y = 0; y < 10; ++y) expect.insert(expect.end(), 3, y);
    CHECK(sorted_f == expect);
    if (i == 0) CHECK(lab[i].train.features == feat[i].train.features);
  }
  CHECK(lab[1].train.labels != feat[1].train.labels);
}

TEST_CASE("partition: shortfall is a data error naming the label") {
  const auto splits = synthetic_splits();
  QsSpec qs;
  qs.samples_per_label_nonqs = 251;
  try {
    partition(splits, HeterogeneitySpec::preset(HeterogeneityKind::kConceptShiftFeatures), qs, 4, 0);
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("label") != std::string::npos);
  }
}

TEST_CASE("shard cache round trip keeps shared test sets") {
  TempDir tmp;
  const auto splits = synthetic_splits();
  QsSpec qs;
  qs.samples_per_label_nonqs = 2;
  const auto shards = partition(splits, HeterogeneitySpec::preset(HeterogeneityKind::kFeatureDistributionSkew), qs, 8, 5);
  write_shard_cache(tmp.path / "c.bin", shards);
  const auto back = read_shard_cache(tmp.path / "c.bin");
  REQUIRE(back.size() == shards.size());
  for (std::size_t i = 0; i < shards.size(); ++i) {
    CHECK(back[i].client_id == shards[i].client_id);
    CHECK(back[i].het_class == shards[i].het_class);
    CHECK(back[i].train.features == shards[i].train.features);
    CHECK(back[i].train.labels == shards[i].train.labels);
    CHECK(back[i].test->features == shards[i].test->features);
  }
  CHECK(back[0].test == back[1].test);
  { std::ofstream(tmp.path / "junk.bin") << "nope"; }
  CHECK_THROWS_AS(read_shard_cache(tmp.path / "junk.bin"), DataError);
}
