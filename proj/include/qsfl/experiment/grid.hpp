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
#include <vector>

#include "qsfl/experiment/config.hpp"

namespace qsfl {

struct Cell {
  ScenarioSpec spec;
  std::filesystem::path data_dir;
};

// Every (dataset, heterogeneity, qs, K, algorithm, seed) combination in
// lexicographic order of those fields, duplicates removed. Seeds include the
// configured offset.
std::vector<Cell> expand_grid(const ExperimentConfig& cfg);

}  // namespace qsfl
