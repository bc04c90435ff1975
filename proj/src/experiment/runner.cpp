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

#include "qsfl/experiment/runner.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "qsfl/clustering/ari.hpp"
#include "qsfl/data/dataset.hpp"
#include "qsfl/error.hpp"
#include "qsfl/parallel.hpp"

namespace qsfl {

namespace fs = std::filesystem;

RunRecord run_cell(const Cell& cell, const DatasetSplits& data, std::size_t client_workers) {
  RunRecord rec;
  rec.scenario = cell.spec;
  rec.config_hash = hex64(cell_hash(cell.spec));
  try {
    const ScenarioSpec& s = cell.spec;
    const auto& sizes = s.algo.layer_sizes;
    if (sizes.front() != data.train.images.cols() || sizes.back() != data.train.num_classes) {
      throw ConfigError("layer_sizes must start at " + std::to_string(data.train.images.cols()) +
                        " inputs and end at " + std::to_string(data.train.num_classes) +
                        " classes for dataset " + s.dataset);
    }
    const auto shards = partition(data, s.heterogeneity_spec(data.train.num_classes),
                                  s.qs_spec(), s.num_clients, s.partition_seed());
    AlgoConfig algo = s.algo;
    algo.workers = client_workers;
    const AlgoResult result = run_algorithm(shards, algo);

    for (const auto& sh : shards) {
      rec.het_class.push_back(sh.het_class);
      rec.samples_per_label.push_back(sh.samples_per_label);
    }
    rec.per_client_accuracy = client_test_accuracy(result, shards);
    rec.final_assignment = result.assignment.membership;
    rec.num_clusters_effective = result.assignment.num_nonempty();
    rec.ari = rec.het_class.size() < 2
                  ? 1.0
                  : adjusted_rand_index(rec.het_class, rec.final_assignment);
    rec.model_digest = model_digest(result.cluster_models);
    rec.trace_digest = trace_digest(result.trace);
    rec.trace = result.trace;
  } catch (const std::exception& e) {
    RunRecord failed;
    failed.scenario = rec.scenario;
    failed.config_hash = rec.config_hash;
    failed.status = "failed";
    failed.error = e.what();
    return failed;
  }
  return rec;
}

RunSummary run_all(const std::vector<Cell>& cells, const RunOptions& opts) {
  std::map<std::pair<std::string, std::string>, DatasetSplits> data;
  for (const auto& c : cells) {
    const auto key = std::make_pair(c.spec.dataset, c.data_dir.string());
    if (!data.contains(key)) data.emplace(key, load_idx_dir(c.data_dir, c.spec.dataset));
  }

  RunSummary summary;
  std::mutex mu;
  auto log = [&](const std::string& line) {
    if (!opts.log) return;
    std::lock_guard lock(mu);
    opts.log(line);
  };
  const std::size_t total = cells.size();
  parallel_for(total, opts.workers, [&](std::size_t i) {
    const Cell& cell = cells[i];
    const fs::path rel = record_relpath(cell.spec);
    const fs::path path = opts.out_dir / rel;
    const std::string progress = "[" + std::to_string(i + 1) + "/" + std::to_string(total) + "] ";
    if (!opts.force && fs::exists(path)) {
      try {
        const RunRecord old = read_record(path);
        if (old.ok() && old.config_hash == hex64(cell_hash(cell.spec))) {
          std::lock_guard lock(mu);
          ++summary.skipped;
          return;
        }
      } catch (const DataError&) {
        // unreadable record: run again
      }
    }
    const auto& splits = data.at(std::make_pair(cell.spec.dataset, cell.data_dir.string()));
    const auto t0 = std::chrono::steady_clock::now();
    const RunRecord rec = run_cell(cell, splits, opts.client_workers);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_record(path, rec);
    const fs::path timing = opts.out_dir / "timing" / rel;
    fs::create_directories(timing.parent_path());
    std::ofstream(timing) << nlohmann::json{{"wall_clock_seconds", secs}}.dump() << "\n";
    {
      std::lock_guard lock(mu);
      ++summary.executed;
      if (!rec.ok()) {
        ++summary.failed;
        summary.failures.push_back(rel.string() + ": " + rec.error);
      }
    }
    std::ostringstream line;
    line << progress << rel.string() << (rec.ok() ? " ok" : " FAILED: " + rec.error);
    if (rec.ok()) line << " ari=" << rec.ari;
    line << " (" << secs << " s)";
    log(line.str());
  });
  return summary;
}

void update_manifest(const fs::path& out_dir, const ExperimentConfig& cfg) {
  const fs::path path = out_dir / "manifest.json";
  nlohmann::json manifest = nlohmann::json::object();
  if (std::ifstream in(path); in) {
    try {
      manifest = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception&) {
      manifest = nlohmann::json::object();
    }
  }
  manifest["configs"][hex64(config_hash(cfg))] = nlohmann::json::parse(config_json(cfg));
  fs::create_directories(out_dir);
  std::ofstream out(path, std::ios::trunc);
  out << manifest.dump(2) << "\n";
  if (!out) throw DataError("cannot write " + path.string());
}

}  // namespace qsfl
