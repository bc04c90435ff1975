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
#include <filesystem>
#include <string>
#include <vector>

#include "qsfl/algorithms/algorithms.hpp"
#include "qsfl/data/partition.hpp"

namespace qsfl {

// One experiment cell. algo.algorithm, algo.num_clusters and algo.seed
// identify the run within the scenario grid.
struct ScenarioSpec {
  std::string dataset = "mnist";
  HeterogeneityKind heterogeneity = HeterogeneityKind::kConceptShiftFeatures;
  std::string het_variant = "rotation";
  QsKind qs = QsKind::kNonQs;
  int num_clients = 20;
  int het_classes = 4;
  int samples_per_label = 10;               // non-QS
  std::vector<int> qs_group_sizes{1, 4, 20, 40};
  bool permute_qs2 = false;
  AlgoConfig algo;

  HeterogeneitySpec heterogeneity_spec(int num_labels) const;
  QsSpec qs_spec() const;
  std::uint64_t partition_seed() const;
};

struct RunRecord {
  ScenarioSpec scenario;
  std::string status = "ok";                // "ok" or "failed"
  std::string error;
  std::string config_hash;                  // hex of cell_hash(scenario)
  std::vector<int> het_class;               // ground truth per client
  std::vector<int> samples_per_label;
  std::vector<double> per_client_accuracy;
  std::vector<int> final_assignment;
  int num_clusters_effective = 0;
  double ari = 0.0;
  std::string model_digest;
  std::string trace_digest;
  AlgoTrace trace;

  bool ok() const { return status == "ok"; }
  Algorithm algorithm() const { return scenario.algo.algorithm; }
  std::uint64_t seed() const { return scenario.algo.seed; }
};

// Canonical JSON of every field that affects results (worker counts
// excluded). Keys are sorted, so equal scenarios serialize identically.
std::string scenario_json(const ScenarioSpec& s);
ScenarioSpec parse_scenario_json(const std::string& text);
std::uint64_t cell_hash(const ScenarioSpec& s);
std::string hex64(std::uint64_t v);

// Scenario identity with selected fields blanked, for grouping records.
std::string scenario_key(const ScenarioSpec& s, bool drop_algorithm, bool drop_qs);

std::string record_json(const RunRecord& r);
RunRecord parse_record(const std::string& text);
void write_record(const std::filesystem::path& path, const RunRecord& r);
RunRecord read_record(const std::filesystem::path& path);

// runs/<dataset>/<het>/<qs>/K<k>/<algorithm>/seed<s>.json
std::filesystem::path record_relpath(const ScenarioSpec& s);

std::string trace_digest(const AlgoTrace& t);

// FNV-1a over the little-endian parameter bytes of every model.
std::string model_digest(std::span<const Model> models);

}  // namespace qsfl
