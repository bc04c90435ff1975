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
#include <functional>
#include <string>
#include <vector>

#include "qsfl/experiment/grid.hpp"

namespace qsfl {

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::size_t workers = 1;
  std::size_t client_workers = 1;
  bool force = false;
  std::function<void(const std::string&)> log;  // progress lines; may be empty
};

struct RunSummary {
  int executed = 0;
  int skipped = 0;
  int failed = 0;
  std::vector<std::string> failures;  // "<record path>: <error>"
};

// Runs one cell and builds its record. Errors inside the run become a
// failed record instead of propagating.
RunRecord run_cell(const Cell& cell, const DatasetSplits& data, std::size_t client_workers);

// Executes every cell into out_dir/runs, skipping cells whose record already
// exists with a matching hash unless `force`. Datasets load before any cell
// runs, so a missing dataset fails the whole sweep. Records do not depend on
// the worker count; wall-clock times go to out_dir/timing.
RunSummary run_all(const std::vector<Cell>& cells, const RunOptions& opts);

// Adds the config to out_dir/manifest.json under its hash.
void update_manifest(const std::filesystem::path& out_dir, const ExperimentConfig& cfg);

}  // namespace qsfl
