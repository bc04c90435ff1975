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

#include "qsfl/data/partition.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <utility>

#include "qsfl/error.hpp"
#include "qsfl/random.hpp"

namespace qsfl {

std::string_view to_string(HeterogeneityKind k) {
  switch (k) {
    case HeterogeneityKind::kConceptShiftFeatures: return "csf";
    case HeterogeneityKind::kConceptShiftLabels: return "csl";
    case HeterogeneityKind::kFeatureDistributionSkew: return "fds";
  }
  return "?";
}

HeterogeneityKind parse_heterogeneity(std::string_view s) {
  if (s == "csf" || s == "concept_shift_features") return HeterogeneityKind::kConceptShiftFeatures;
  if (s == "csl" || s == "concept_shift_labels") return HeterogeneityKind::kConceptShiftLabels;
  if (s == "fds" || s == "feature_distribution_skew") {
    return HeterogeneityKind::kFeatureDistributionSkew;
  }
  throw ConfigError("unknown heterogeneity kind '" + std::string(s) + "'");
}

std::string_view to_string(QsKind k) {
  switch (k) {
    case QsKind::kNonQs: return "nonqs";
    case QsKind::kQs1: return "qs1";
    case QsKind::kQs2: return "qs2";
  }
  return "?";
}

QsKind parse_qs(std::string_view s) {
  if (s == "nonqs" || s == "none") return QsKind::kNonQs;
  if (s == "qs1") return QsKind::kQs1;
  if (s == "qs2") return QsKind::kQs2;
  throw ConfigError("unknown quantity-skew kind '" + std::string(s) + "'");
}

void HeterogeneitySpec::validate(int num_labels) const {
  if (classes.empty()) throw ConfigError("heterogeneity spec has no classes");
  if (!classes.front().features.is_identity()) {
    throw ConfigError("heterogeneity class 0 must be the untransformed class");
  }
  if (!classes.front().label_table.empty()) {
    std::vector<int> id(classes.front().label_table.size());
    std::iota(id.begin(), id.end(), 0);
    if (classes.front().label_table != id) {
      throw ConfigError("heterogeneity class 0 must keep labels unchanged");
    }
  }
  for (const auto& c : classes) {
    if (!c.label_table.empty()) {
      if (static_cast<int>(c.label_table.size()) != num_labels) {
        throw ConfigError("label swap table size differs from the dataset's label count");
      }
      std::vector<int> probe(num_labels);
      std::iota(probe.begin(), probe.end(), 0);
      apply_label_swap(c.label_table, probe);  // throws on non-permutations
    }
  }
}

HeterogeneitySpec HeterogeneitySpec::preset(HeterogeneityKind kind, int num_classes_het,
                                            int num_labels, std::string_view variant) {
  if (num_classes_het < 1 || num_classes_het > 4) {
    throw ConfigError("built-in heterogeneity presets define 1 to 4 classes");
  }
  HeterogeneitySpec spec;
  spec.kind = kind;
  std::array<std::string_view, 4> names{};
  switch (kind) {
    case HeterogeneityKind::kConceptShiftFeatures:
      if (variant == "rotation") {
        names = {"identity", "rot90", "rot180", "rot270"};
      } else if (variant == "medical") {
        names = {"identity", "invert", "zoom", "invert+zoom"};
      } else {
        throw ConfigError("unknown concept-shift variant '" + std::string(variant) + "'");
      }
      break;
    case HeterogeneityKind::kFeatureDistributionSkew:
      names = {"identity", "dilate", "erode", "dilate2"};
      break;
    case HeterogeneityKind::kConceptShiftLabels: {
      if (num_labels < 10) throw ConfigError("label-swap preset needs at least 10 labels");
      const std::vector<std::vector<std::pair<int, int>>> swaps{
          {}, {{0, 1}, {2, 3}}, {{4, 5}, {6, 7}}, {{8, 9}, {0, 2}}};
      for (int c = 0; c < num_classes_het; ++c) {
        spec.classes.push_back({Transform::parse("identity"), swap_table(num_labels, swaps[c])});
      }
      return spec;
    }
  }
  for (int c = 0; c < num_classes_het; ++c) {
    spec.classes.push_back({Transform::parse(names[c]), {}});
  }
  return spec;
}

std::vector<int> samples_per_label_plan(const QsSpec& qs, int num_clients, int num_classes_het,
                                        std::uint64_t seed) {
  if (num_classes_het < 1 || num_clients < num_classes_het || num_clients % num_classes_het != 0) {
    throw ConfigError("num_clients (" + std::to_string(num_clients) +
                      ") must be a positive multiple of the heterogeneity class count (" +
                      std::to_string(num_classes_het) + ")");
  }
  const int per_class = num_clients / num_classes_het;
  std::vector<int> plan(num_clients);
  switch (qs.kind) {
    case QsKind::kNonQs:
      if (qs.samples_per_label_nonqs < 1) throw ConfigError("samples_per_label must be >= 1");
      std::fill(plan.begin(), plan.end(), qs.samples_per_label_nonqs);
      break;
    case QsKind::kQs1:
      if (qs.group_sizes.empty()) throw ConfigError("QS1 needs at least one group size");
      // Round-robin within each class; remainders favour the first groups.
      for (int i = 0; i < num_clients; ++i) {
        plan[i] = qs.group_sizes[(i % per_class) % qs.group_sizes.size()];
      }
      break;
    case QsKind::kQs2: {
      if (static_cast<int>(qs.group_sizes.size()) != num_classes_het) {
        throw ConfigError("QS2 needs exactly one group size per heterogeneity class");
      }
      std::vector<int> group_of_class(num_classes_het);
      std::iota(group_of_class.begin(), group_of_class.end(), 0);
      if (qs.permute_qs2) {
        Rng rng(derive_seed(seed, "qs2-groups"));
        shuffle(group_of_class, rng);
      }
      for (int i = 0; i < num_clients; ++i) {
        plan[i] = qs.group_sizes[group_of_class[i / per_class]];
      }
      break;
    }
  }
  for (int s : plan) {
    if (s < 1) throw ConfigError("samples per label must be >= 1");
  }
  return plan;
}

namespace {

Data transformed_rows(const Dataset& src, const std::vector<Index>& rows, const ClassTransform& ct) {
  Data out;
  out.features.resize(static_cast<Index>(rows.size()), src.images.cols());
  out.labels.resize(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (ct.features.is_identity()) {
      out.features.row(r) = src.images.row(rows[r]);
    } else {
      Image img = Eigen::Map<const Image>(src.images.row(rows[r]).data(), src.side, src.side);
      Image t = apply_transform(ct.features, img);
      out.features.row(r) = Eigen::Map<const Eigen::RowVectorXd>(t.data(), t.size());
    }
    out.labels[r] = src.labels[rows[r]];
  }
  if (!ct.label_table.empty()) out.labels = apply_label_swap(ct.label_table, out.labels);
  return out;
}

}  // namespace

std::vector<ClientShard> partition(const DatasetSplits& data, const HeterogeneitySpec& het,
                                   const QsSpec& qs, int num_clients, std::uint64_t seed) {
  data.train.validate();
  data.test.validate();
  const int num_labels = data.train.num_classes;
  het.validate(num_labels);
  const int num_het = het.num_classes_het();
  const std::vector<int> plan = samples_per_label_plan(qs, num_clients, num_het, seed);
  const int per_class = num_clients / num_het;

  std::vector<std::vector<Index>> pool(num_labels);
  for (Index i = 0; i < data.train.size(); ++i) pool[data.train.labels[i]].push_back(i);
  for (int y = 0; y < num_labels; ++y) {
    const int need = *std::max_element(plan.begin(), plan.end());
    if (static_cast<int>(pool[y].size()) < need) {
      throw DataError("label " + std::to_string(y) + ": need " + std::to_string(need) +
                      " samples per client, pool has " + std::to_string(pool[y].size()) +
                      " (short by " + std::to_string(need - static_cast<int>(pool[y].size())) + ")");
    }
  }

  const Index test_per_class = data.test.size() / num_het;
  if (test_per_class < 1) throw DataError("test pool smaller than the heterogeneity class count");
  std::vector<Index> test_order(data.test.size());
  std::iota(test_order.begin(), test_order.end(), 0);
  {
    Rng rng(derive_seed(seed, "test-split"));
    shuffle(test_order, rng);
  }
  std::vector<std::shared_ptr<const Data>> tests(num_het);
  for (int c = 0; c < num_het; ++c) {
    std::vector<Index> rows(test_order.begin() + c * test_per_class,
                            test_order.begin() + (c + 1) * test_per_class);
    tests[c] = std::make_shared<const Data>(transformed_rows(data.test, rows, het.classes[c]));
  }

  std::vector<ClientShard> shards(num_clients);
  for (int i = 0; i < num_clients; ++i) {
    Rng rng(derive_seed(seed, "client", {static_cast<std::uint64_t>(i)}));
    std::vector<Index> rows;
    rows.reserve(static_cast<std::size_t>(plan[i]) * num_labels);
    for (int y = 0; y < num_labels; ++y) {
      std::vector<Index> candidates = pool[y];
      // Partial Fisher-Yates: the first plan[i] slots become the draw.
      for (int k = 0; k < plan[i]; ++k) {
        const auto j = k + uniform_index(rng, candidates.size() - k);
        std::swap(candidates[k], candidates[j]);
        rows.push_back(candidates[k]);
      }
    }
    const int c = i / per_class;
    shards[i].client_id = i;
    shards[i].het_class = c;
    shards[i].samples_per_label = plan[i];
    shards[i].train = transformed_rows(data.train, rows, het.classes[c]);
    shards[i].test = tests[c];
  }
  return shards;
}

}  // namespace qsfl
