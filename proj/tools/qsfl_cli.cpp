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

// qsfl: partition, run, report and verify clustered federated learning
// experiments.
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error,
// 3 data error, 4 sweep finished with failed cells.

#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <tuple>

#include <CLI11.hpp>

#include "qsfl/data/dataset.hpp"
#include "qsfl/data/shard_cache.hpp"
#include "qsfl/error.hpp"
#include "qsfl/experiment/config.hpp"
#include "qsfl/experiment/grid.hpp"
#include "qsfl/experiment/report.hpp"
#include "qsfl/experiment/runner.hpp"
#include "qsfl/verify/oracles.hpp"

namespace {

namespace fs = std::filesystem;
using namespace qsfl;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed_offset;
  std::optional<std::size_t> workers;
  std::optional<std::string> out_dir;
  bool force = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON experiment config");
  cmd->add_option("--seed-offset", f.seed_offset, "Added to every configured seed");
  cmd->add_option("--workers", f.workers, "Cells run in parallel");
  cmd->add_option("--out-dir", f.out_dir, "Results store directory");
  cmd->add_flag("--force", f.force, "Re-run cells that already have a record");
}

// File values first, then flags.
ExperimentConfig resolve(const CommonFlags& f) {
  ExperimentConfig cfg = f.config.empty() ? default_config() : load_config(f.config);
  if (f.seed_offset) cfg.seed_offset = *f.seed_offset;
  if (f.workers) {
    if (*f.workers < 1) throw ConfigError("--workers must be >= 1");
    cfg.workers = *f.workers;
  }
  if (f.out_dir) cfg.out_dir = *f.out_dir;
  cfg.force = f.force;
  return cfg;
}

int cmd_partition(const CommonFlags& flags) {
  const ExperimentConfig cfg = resolve(flags);
  std::set<std::tuple<std::string, std::string, std::string, std::uint64_t>> done;
  std::map<std::string, DatasetSplits> data;
  for (const auto& d : cfg.datasets) data.emplace(d.name, load_idx_dir(d.dir, d.name));
  for (const Cell& cell : expand_grid(cfg)) {
    const ScenarioSpec& s = cell.spec;
    const std::string het(to_string(s.heterogeneity)), qs(to_string(s.qs));
    if (!done.insert({s.dataset, het, qs, s.algo.seed}).second) continue;
    const fs::path path = cfg.out_dir / "shards" / s.dataset / het / qs /
                          ("seed" + std::to_string(s.algo.seed) + ".bin");
    if (!cfg.force && fs::exists(path)) continue;
    const DatasetSplits& splits = data.at(s.dataset);
    const auto shards = partition(splits, s.heterogeneity_spec(splits.train.num_classes),
                                  s.qs_spec(), s.num_clients, s.partition_seed());
    fs::create_directories(path.parent_path());
    write_shard_cache(path, shards);
    std::cout << path.string() << " (" << shards.size() << " clients)\n";
  }
  return 0;
}

int cmd_run(const CommonFlags& flags) {
  const ExperimentConfig cfg = resolve(flags);
  const auto cells = expand_grid(cfg);
  RunOptions opts;
  opts.out_dir = cfg.out_dir;
  opts.workers = cfg.workers;
  opts.client_workers = cfg.client_workers;
  opts.force = cfg.force;
  opts.log = [](const std::string& line) { std::cerr << line << std::endl; };
  update_manifest(cfg.out_dir, cfg);
  const RunSummary s = run_all(cells, opts);
  std::cout << cells.size() << " cells: " << s.executed << " executed, " << s.skipped
            << " skipped, " << s.failed << " failed\n";
  for (const auto& f : s.failures) std::cout << "  failed " << f << "\n";
  return s.failed > 0 ? 4 : 0;
}

int cmd_report(const CommonFlags& flags, const std::vector<std::string>& kinds) {
  const ExperimentConfig cfg = resolve(flags);
  const auto records = load_store(cfg.out_dir);
  const bool all = kinds.empty();
  std::vector<ReportKind> wanted;
  if (all) {
    wanted = all_report_kinds();
  } else {
    for (const auto& k : kinds) wanted.push_back(parse_report_kind(k));
  }
  for (ReportKind k : wanted) {
    try {
      std::cout << write_report(cfg.out_dir, records, k).string() << "\n";
    } catch (const DataError& e) {
      if (!all) throw;
      std::cerr << "skipped " << to_string(k) << ": " << e.what() << "\n";
    }
  }
  return 0;
}

int cmd_verify(std::uint64_t seed) {
  bool ok = true;
  for (const auto& r : oracle::run_suite(seed)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustered federated learning experiments"};
  app.require_subcommand(1);
  CommonFlags flags;
  std::vector<std::string> kinds;
  std::uint64_t verify_seed = 0;

  auto* partition_cmd = app.add_subcommand("partition", "Write client shard caches");
  add_common(partition_cmd, flags);
  auto* run_cmd = app.add_subcommand("run", "Execute the scenario grid");
  add_common(run_cmd, flags);
  auto* report_cmd = app.add_subcommand("report", "Write CSV reports from the results store");
  add_common(report_cmd, flags);
  report_cmd->add_option("--kind", kinds,
                         "tables, delta_heatmap, winrate, rank, sensitivity (default: all)");
  auto* verify_cmd = app.add_subcommand("verify", "Run the oracle equivalence checks");
  verify_cmd->add_option("--seed", verify_seed, "Seed for random test instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*partition_cmd) return cmd_partition(flags);
    if (*run_cmd) return cmd_run(flags);
    if (*report_cmd) return cmd_report(flags, kinds);
    if (*verify_cmd) return cmd_verify(verify_seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
