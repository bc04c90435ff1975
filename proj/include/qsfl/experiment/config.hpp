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

#include "qsfl/eval/record.hpp"

namespace qsfl {

// Environment variable naming the default dataset directory.
inline constexpr const char* kDataDirEnv = "QSFL_DATA_DIR";

struct DatasetRef {
  std::string name;
  std::filesystem::path dir;  // holds the four IDX files
};

struct ExperimentConfig {
  std::vector<DatasetRef> datasets;
  std::vector<HeterogeneityKind> heterogeneity{HeterogeneityKind::kConceptShiftFeatures};
  std::vector<QsKind> qs{QsKind::kNonQs, QsKind::kQs1, QsKind::kQs2};
  std::vector<Algorithm> algorithms = all_algorithms();
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::vector<int> clusters{4};
  // Template for every cell; algorithm, K and seed are set per cell.
  ScenarioSpec base;
  std::uint64_t seed_offset = 0;

  // Execution only; never part of the hash.
  std::filesystem::path out_dir = "out";
  std::size_t workers = 1;         // cells run in parallel
  std::size_t client_workers = 1;  // clients in parallel inside a cell
  bool force = false;

  void validate() const;
};

// $QSFL_DATA_DIR if set, else the directory configured at build time.
std::filesystem::path default_data_dir();

// Parses the JSON config. Relative dataset directories resolve against
// `base_dir`. Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig default_config();

// Canonical JSON of the fields that affect results, and its FNV-1a hash.
std::string config_json(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace qsfl
