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

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qsfl/data/dataset.hpp"
#include "qsfl/data/transforms.hpp"

namespace qsfl {

enum class HeterogeneityKind { kConceptShiftFeatures, kConceptShiftLabels, kFeatureDistributionSkew };

std::string_view to_string(HeterogeneityKind k);       // "csf", "csl", "fds"
HeterogeneityKind parse_heterogeneity(std::string_view s);

// What makes heterogeneity class c different: an image transform and a label
// permutation (empty = identity).
struct ClassTransform {
  Transform features;
  std::vector<int> label_table;
};

struct HeterogeneitySpec {
  HeterogeneityKind kind = HeterogeneityKind::kConceptShiftFeatures;
  std::vector<ClassTransform> classes;

  int num_classes_het() const { return static_cast<int>(classes.size()); }
  void validate(int num_labels) const;

  // Default class maps:
  //   csf "rotation": {rot0, rot90, rot180, rot270}
  //   csf "medical":  {identity, invert, zoom, invert+zoom}
  //   csl: {identity, (0 1)(2 3), (4 5)(6 7), (8 9)(0 2)}
  //   fds: {identity, dilate, erode, dilate2}
  static HeterogeneitySpec preset(HeterogeneityKind kind, int num_classes_het = 4,
                                  int num_labels = 10, std::string_view variant = "rotation");
};

enum class QsKind { kNonQs, kQs1, kQs2 };

std::string_view to_string(QsKind k);  // "nonqs", "qs1", "qs2"
QsKind parse_qs(std::string_view s);

struct QsSpec {
  QsKind kind = QsKind::kNonQs;
  int samples_per_label_nonqs = 50;
  std::vector<int> group_sizes{5, 20, 100, 200};
  // QS2 assigns group c to class c unless this is set, in which case the
  // mapping is a seeded permutation.
  bool permute_qs2 = false;
};

struct ClientShard {
  int client_id = 0;
  int het_class = 0;
  int samples_per_label = 0;
  Data train;
  // Shared by every client of the same heterogeneity class.
  std::shared_ptr<const Data> test;

  Index num_samples() const { return train.size(); }
};

// Samples per label for every client, before any data is drawn.
std::vector<int> samples_per_label_plan(const QsSpec& qs, int num_clients, int num_classes_het,
                                        std::uint64_t seed);

// Splits `data` into `num_clients` shards. Clients are assigned to
// heterogeneity classes in contiguous blocks of num_clients / num_classes_het.
// Each client draws samples_per_label images of every label without
// replacement from the train pool (different clients may share images), using
// the substream (seed, client_id). Each class receives a disjoint
// floor(|test| / num_classes_het) slice of the shuffled test pool. The class
// transform is applied to train and test data alike.
std::vector<ClientShard> partition(const DatasetSplits& data, const HeterogeneitySpec& het,
                                   const QsSpec& qs, int num_clients, std::uint64_t seed);

}  // namespace qsfl
