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


#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "qsfl/error.hpp"
#include "qsfl/experiment/config.hpp"
#include "qsfl/experiment/grid.hpp"
#include "qsfl/experiment/report.hpp"
#include "qsfl/experiment/runner.hpp"

using namespace qsfl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> store_bytes(const fs::path& out) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(out / "runs")) {
    if (e.is_regular_file()) files[fs::relative(e.path(), out).string()] = slurp(e.path());
  }
  return files;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qsfl_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// A handful of fast cells on the bundled digits.
ExperimentConfig tiny_config(const fs::path& out) {
  ExperimentConfig c = parse_config(R"({
    "data": {"datasets": [{"name": "mnist", "dir": ")" QSFL_TEST_DATA_DIR R"("}]},
    "grid": {"qs": ["nonqs", "qs2"], "algorithms": ["fedavg", "flhc", "cornflqs"],
             "seeds": [0, 1], "clusters": [2]},
    "scenario": {"num_clients": 4, "het_classes": 2, "samples_per_label": 2,
                 "qs_group_sizes": [1, 3]},
    "train": {"rounds": 4, "local_epochs": 1, "layer_sizes": [784, 8, 10]}
  })",
                                    fs::current_path());
  c.out_dir = out;
  return c;
}

RunOptions options(const ExperimentConfig& c, std::size_t workers) {
  RunOptions o;
  o.out_dir = c.out_dir;
  o.workers = workers;
  return o;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QSFL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config: defaults, overrides and relative dataset paths") {
  const ExperimentConfig d = default_config();
  CHECK(d.seeds.size() == 5);
  CHECK(d.base.num_clients == 20);
  CHECK(d.base.algo.layer_sizes == std::vector<Index>{784, 200, 10});

  const ExperimentConfig c = parse_config(R"({
    // comments are allowed
    "data": {"datasets": [{"name": "digits", "dir": "rel/dir"}]},
    "train": {"rounds": 7, "learning_rate": 0.1},
    "algo": {"ifca_selection": "train_loss", "prox_mu": 0.5},
    "run": {"seed_offset": 10}
  })",
                                          "/base");
  CHECK(c.datasets.at(0).dir == fs::path("/base/rel/dir"));
  CHECK(c.base.algo.rounds == 7);
  CHECK(c.base.algo.train.learning_rate == 0.1);
  CHECK(c.base.algo.ifca_selection == IfcaSelection::kTrainLoss);
  CHECK(c.seed_offset == 10);
}

TEST_CASE("config: unknown keys, bad values and bad JSON are config errors") {
  CHECK_THROWS_AS(parse_config(R"({"trian": {}})", "."), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"train": {"round": 3}})", "."), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"algorithms": ["nope"]}})", "."), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"seeds": []}})", "."), ConfigError);
  CHECK_THROWS_AS(parse_config("{", "."), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/qsfl.json"), ConfigError);
}

TEST_CASE("config hash ignores execution settings") {
  ExperimentConfig a = default_config();
  ExperimentConfig b = a;
  b.workers = 8;
  b.out_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  b.base.algo.rounds = 3;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("grid: cell counts and order") {
  ExperimentConfig c = default_config();
  c.algorithms = {Algorithm::kCornflqs};
  c.heterogeneity = {HeterogeneityKind::kConceptShiftFeatures, HeterogeneityKind::kConceptShiftLabels,
                     HeterogeneityKind::kFeatureDistributionSkew};
  c.datasets.clear();
  for (int d = 0; d < 6; ++d) c.datasets.push_back({"ds" + std::to_string(d), "."});
  CHECK(expand_grid(c).size() == 270);

  c.datasets.resize(1);
  const auto cells = expand_grid(c);
  CHECK(cells.size() == 45);
  for (std::size_t i = 1; i < cells.size(); ++i) {
    CHECK(record_relpath(cells[i - 1].spec) < record_relpath(cells[i].spec));
  }

  c.heterogeneity = {HeterogeneityKind::kConceptShiftFeatures, HeterogeneityKind::kConceptShiftFeatures};
  c.qs = {QsKind::kNonQs};
  c.seeds = {3};
  c.seed_offset = 100;
  const auto one = expand_grid(c);
  REQUIRE(one.size() == 1);
  CHECK(one[0].spec.algo.seed == 103);
}

TEST_CASE("run_all: idempotent, worker independent, timing kept apart") {
  const fs::path a = scratch("runs_a"), b = scratch("runs_b");
  ExperimentConfig ca = tiny_config(a), cb = tiny_config(b);
  const auto cells = expand_grid(ca);
  REQUIRE(cells.size() == 12);

  const RunSummary first = run_all(cells, options(ca, 1));
  CHECK(first.executed == 12);
  CHECK(first.failed == 0);
  const RunSummary again = run_all(cells, options(ca, 1));
  CHECK(again.executed == 0);
  CHECK(again.skipped == 12);

  run_all(expand_grid(cb), options(cb, 4));
  CHECK(store_bytes(a) == store_bytes(b));
  CHECK(fs::exists(a / "timing"));

  RunOptions forced = options(ca, 2);
  forced.force = true;
  const auto before = store_bytes(a);
  CHECK(run_all(cells, forced).executed == 12);
  CHECK(store_bytes(a) == before);

  const auto records = load_store(a);
  CHECK(records.size() == 12);
  for (const auto& r : records) {
    CHECK(r.ok());
    CHECK(r.per_client_accuracy.size() == 4);
    CHECK(r.het_class == std::vector<int>{0, 0, 1, 1});
  }

  for (ReportKind k : {ReportKind::kTables, ReportKind::kDeltaHeatmap, ReportKind::kWinrate,
                       ReportKind::kRank}) {
    const fs::path p = write_report(a, records, k);
    CHECK(fs::file_size(p) > 0);
  }
  const std::string rank = report_csv(records, ReportKind::kRank);
  CHECK(rank.rfind("algorithm,rank,acc_mean,acc_std,ari", 0) == 0);
  CHECK(report_csv(records, ReportKind::kTables).find("±") != std::string::npos);
  // One K only, so there is nothing to compare.
  CHECK_THROWS_AS(report_csv(records, ReportKind::kSensitivity), DataError);

  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("run_all: an invalid cell fails alone, missing data fails the sweep") {
  const fs::path out = scratch("runs_fail");
  ExperimentConfig c = tiny_config(out);
  c.qs = {QsKind::kNonQs};
  c.algorithms = {Algorithm::kFlhc};
  c.seeds = {0};
  c.clusters = {2, 5};
  const RunSummary s = run_all(expand_grid(c), options(c, 1));
  CHECK(s.executed == 2);
  CHECK(s.failed == 1);
  const auto records = load_store(out);
  REQUIRE(records.size() == 2);
  int failed = 0;
  for (const auto& r : records) {
    if (!r.ok()) {
      ++failed;
      CHECK(r.error.find("K") != std::string::npos);
    }
  }
  CHECK(failed == 1);

  c.datasets = {{"mnist", out / "missing"}};
  CHECK_THROWS_AS(run_all(expand_grid(c), options(c, 1)), DataError);
  fs::remove_all(out);
}

TEST_CASE("reports: empty store is an error") {
  const fs::path out = scratch("empty");
  CHECK_THROWS_AS(load_store(out), DataError);
  fs::remove_all(out);
}

TEST_CASE("cli: exit codes") {
  const fs::path dir = scratch("cli");
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("run --config " + (dir / "missing.json").string()) == 2);

  std::ofstream(dir / "bad.json") << R"({"grid": {"bogus": 1}})";
  CHECK(run_cli("run --config " + (dir / "bad.json").string()) == 2);

  std::ofstream(dir / "nodata.json")
      << R"({"data": {"datasets": [{"name": "m", "dir": "nowhere"}]}, "grid": {"seeds": [0]}})";
  CHECK(run_cli("run --config " + (dir / "nodata.json").string()) == 3);

  CHECK(run_cli("report --out-dir " + (dir / "empty").string()) == 3);

  std::ofstream(dir / "partial.json") << R"({
    "data": {"datasets": [{"name": "mnist", "dir": ")" QSFL_TEST_DATA_DIR R"("}]},
    "grid": {"qs": ["nonqs"], "algorithms": ["cfl"], "seeds": [0], "clusters": [9]},
    "scenario": {"num_clients": 4, "het_classes": 2, "samples_per_label": 1},
    "train": {"rounds": 2, "local_epochs": 1, "layer_sizes": [784, 4, 10]}
  })";
  CHECK(run_cli("run --config " + (dir / "partial.json").string() + " --out-dir " +
                (dir / "out").string()) == 4);
  CHECK(run_cli("report --out-dir " + (dir / "out").string()) == 0);
  fs::remove_all(dir);
}
