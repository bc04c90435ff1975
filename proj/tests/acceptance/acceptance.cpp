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


// End-to-end acceptance run: a desk-scale sweep on the digit data, the oracle
// suite, a determinism rerun and the K = 1 reductions. Prints one PASS/FAIL
// line per criterion and exits nonzero if any fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qsfl/algorithms/algorithms.hpp"
#include "qsfl/data/dataset.hpp"
#include "qsfl/eval/metrics.hpp"
#include "qsfl/experiment/config.hpp"
#include "qsfl/experiment/grid.hpp"
#include "qsfl/experiment/report.hpp"
#include "qsfl/experiment/runner.hpp"
#include "qsfl/verify/oracles.hpp"

namespace fs = std::filesystem;
using namespace qsfl;

namespace {

struct Outcome {
  Outcome(int i, std::string t) : id(i), title(std::move(t)) {}

  int id;
  std::string title;
  bool passed = false;
  std::string detail;
};

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

class Store {
 public:
  explicit Store(std::vector<RunRecord> records) : records_(std::move(records)) {}

  // Records of one algorithm at (qs, K), ordered by seed.
  std::vector<RunRecord> select(Algorithm a, QsKind qs, int K) const {
    std::map<std::uint64_t, RunRecord> by_seed;
    for (const auto& r : records_) {
      if (r.ok() && r.algorithm() == a && r.scenario.qs == qs && r.scenario.algo.num_clusters == K) {
        by_seed.emplace(r.seed(), r);
      }
    }
    std::vector<RunRecord> out;
    for (auto& [s, r] : by_seed) out.push_back(std::move(r));
    return out;
  }

  const std::vector<RunRecord>& all() const { return records_; }

 private:
  std::vector<RunRecord> records_;
};

std::string list(const std::vector<double>& v, int prec = 3) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v[i], prec);
  return s + "]";
}

// Sub-sweeps of the desk grid. Each only runs what some criterion reads.
std::vector<Cell> desk_cells(const ExperimentConfig& base) {
  struct Part {
    std::vector<QsKind> qs;
    std::vector<Algorithm> algorithms;
    std::vector<int> clusters;
  };
  const std::vector<Part> parts{
      {{QsKind::kNonQs},
       {Algorithm::kFedAvg, Algorithm::kCfl, Algorithm::kFlhc, Algorithm::kCornflqs},
       {4}},
      {{QsKind::kQs1}, {Algorithm::kFlhc, Algorithm::kCornflqs}, {4}},
      {{QsKind::kQs2}, {Algorithm::kCornflqs}, {4}},
      {{QsKind::kNonQs}, {Algorithm::kCornflqs}, {2, 3, 6, 8}},
  };
  std::vector<Cell> cells;
  for (const auto& p : parts) {
    ExperimentConfig c = base;
    c.qs = p.qs;
    c.algorithms = p.algorithms;
    c.clusters = p.clusters;
    for (auto& cell : expand_grid(c)) cells.push_back(std::move(cell));
  }
  return cells;
}

std::map<std::string, std::string> store_bytes(const fs::path& out) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(out / "runs")) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files[fs::relative(e.path(), out).string()] = ss.str();
  }
  return files;
}

Outcome criterion_recovery(const Store& s) {
  Outcome o{1, "clustering recovery, non-QS: cornflqs and flhc ARI >= 0.9 in >= 4/5 seeds"};
  bool ok = true;
  for (Algorithm a : {Algorithm::kCornflqs, Algorithm::kFlhc}) {
    const auto rs = s.select(a, QsKind::kNonQs, 4);
    std::vector<double> ari;
    int good = 0;
    for (const auto& r : rs) {
      ari.push_back(r.ari);
      if (r.ari >= 0.9) ++good;
    }
    ok = ok && rs.size() == 5 && good >= 4;
    o.detail += std::string(to_string(a)) + " ARI " + list(ari) + " (" + std::to_string(good) +
                "/" + std::to_string(rs.size()) + ")  ";
  }
  o.passed = ok;
  return o;
}

Outcome criterion_gap(const Store& s) {
  Outcome o{2, "clustered vs flat: cfl beats fedavg by >= 10 points in >= 4/5 seeds"};
  const auto cfl = s.select(Algorithm::kCfl, QsKind::kNonQs, 4);
  const auto avg = s.select(Algorithm::kFedAvg, QsKind::kNonQs, 4);
  std::vector<double> gap;
  int good = 0;
  for (std::size_t i = 0; i < std::min(cfl.size(), avg.size()); ++i) {
    if (cfl[i].seed() != avg[i].seed()) continue;
    gap.push_back(100.0 * (global_accuracy(cfl[i]) - global_accuracy(avg[i])));
    if (gap.back() >= 10.0) ++good;
  }
  o.passed = gap.size() == 5 && good >= 4;
  o.detail = "gap (points) " + list(gap, 2) + " (" + std::to_string(good) + "/" +
             std::to_string(gap.size()) + ")";
  return o;
}

Outcome criterion_fragility(const Store& s) {
  Outcome o{3, "QS1 fragility: flhc mean ARI(non-QS) - ARI(QS1) >= 0.2"};
  const auto base = s.select(Algorithm::kFlhc, QsKind::kNonQs, 4);
  const auto qs1 = s.select(Algorithm::kFlhc, QsKind::kQs1, 4);
  try {
    const double d = delta_ari(base, qs1);
    o.passed = base.size() == 5 && qs1.size() == 5 && d >= 0.2;
    o.detail = "delta ARI " + fmt(d);
  } catch (const std::exception& e) {
    o.detail = e.what();
  }
  return o;
}

// Mean over seeds of |ARI(non-QS) - ARI(QS)|, and |mean difference|.
std::pair<double, double> abs_deltas(const std::vector<RunRecord>& base,
                                     const std::vector<RunRecord>& qs) {
  std::vector<double> abs;
  for (const auto& b : base) {
    for (const auto& q : qs) {
      if (q.seed() == b.seed()) abs.push_back(std::abs(b.ari - q.ari));
    }
  }
  if (abs.empty()) throw DataError("no aligned seeds");
  return {global_accuracy(abs), std::abs(delta_ari(base, qs))};
}

Outcome criterion_robustness(const Store& s) {
  Outcome o{4, "cornflqs robustness: mean |dARI| <= 0.15 (QS1) and <= 0.25 (QS2)"};
  const auto base = s.select(Algorithm::kCornflqs, QsKind::kNonQs, 4);
  try {
    const auto [q1, q1m] = abs_deltas(base, s.select(Algorithm::kCornflqs, QsKind::kQs1, 4));
    const auto [q2, q2m] = abs_deltas(base, s.select(Algorithm::kCornflqs, QsKind::kQs2, 4));
    o.passed = base.size() == 5 && q1 <= 0.15 && q2 <= 0.25;
    o.detail = "QS1 mean|d| " + fmt(q1) + " |mean d| " + fmt(q1m) + "; QS2 mean|d| " + fmt(q2) +
               " |mean d| " + fmt(q2m);
  } catch (const std::exception& e) {
    o.detail = e.what();
  }
  return o;
}

Outcome criterion_sensitivity(const Store& s) {
  Outcome o{5, "K sensitivity: acc(4)-acc(2) >= 2 (acc(4)-acc(8)) and acc(8) >= acc(2)"};
  std::map<int, double> acc;
  for (int K : {2, 3, 4, 6, 8}) {
    const auto rs = s.select(Algorithm::kCornflqs, QsKind::kNonQs, K);
    if (rs.size() != 5) {
      o.detail = "missing records at K = " + std::to_string(K);
      return o;
    }
    acc[K] = 100.0 * aggregate_cell(rs).acc_mean;
    o.detail += "K" + std::to_string(K) + " " + fmt(acc[K], 2) + "  ";
  }
  const double under = acc[4] - acc[2], over = acc[4] - acc[8];
  o.passed = under >= 2.0 * over && acc[8] >= acc[2];
  o.detail += "| under " + fmt(under, 2) + " over " + fmt(over, 2);
  return o;
}

std::vector<Outcome> criteria_oracles(std::uint64_t seed) {
  Outcome eq{6, "oracle equivalence: ARI, Ward, trimmed mean, duplication (< 60 s)"};
  const auto t0 = Clock::now();
  const std::vector<oracle::CheckResult> checks{
      oracle::check_ari(seed), oracle::check_ward(seed), oracle::check_trimmed_mean(seed),
      oracle::check_duplication(seed)};
  const double elapsed = seconds_since(t0);
  eq.passed = elapsed < 60.0;
  for (const auto& c : checks) {
    eq.passed = eq.passed && c.passed;
    eq.detail += c.name + " worst " + sci(c.worst) + (c.passed ? "" : " FAILED") +
                 "; ";
  }
  eq.detail += fmt(elapsed, 1) + " s";

  Outcome grad{7, "gradient check: 100 draws within 1e-4 relative"};
  const auto g = oracle::check_gradients(seed);
  grad.passed = g.passed && g.trials == 100;
  grad.detail = "worst relative error " + sci(g.worst) + " over " + std::to_string(g.trials) +
                " draws";
  return {eq, grad};
}

Outcome criterion_reductions(const ExperimentConfig& base, std::size_t client_workers) {
  Outcome o{9, "K = 1 reductions reproduce FedAvg bit for bit"};
  ScenarioSpec spec = base.base;
  spec.qs = QsKind::kNonQs;
  const DatasetSplits data = load_idx_dir(base.datasets.at(0).dir);
  const auto shards = partition(data, spec.heterogeneity_spec(10), spec.qs_spec(),
                                spec.num_clients, spec.partition_seed());
  AlgoConfig cfg = spec.algo;
  cfg.num_clusters = 1;
  cfg.workers = client_workers;

  std::map<std::pair<int, std::uint64_t>, std::vector<Model>> fedavg_cache;
  auto fedavg = [&](int rounds, std::uint64_t stream) {
    auto& slot = fedavg_cache[{rounds, stream}];
    if (slot.empty()) {
      AlgoConfig c = cfg;
      c.algorithm = Algorithm::kFedAvg;
      c.rounds = rounds;
      c.stream = stream;
      slot = run_fedavg(shards, c).cluster_models;
    }
    return slot;
  };

  bool ok = true;
  for (Algorithm a : {Algorithm::kCfl, Algorithm::kFlhc, Algorithm::kFedGroup, Algorithm::kIfca,
                      Algorithm::kCornflqs}) {
    AlgoConfig c = cfg;
    c.algorithm = a;
    const AlgoResult r = run_algorithm(shards, c);
    int rounds = cfg.rounds;
    std::uint64_t stream = cfg.stream;
    if (a == Algorithm::kFedGroup) rounds += 1;
    if (a == Algorithm::kCornflqs) rounds += 2;
    if (a == Algorithm::kIfca) stream += static_cast<std::uint64_t>(r.trace.selected_restart);
    const bool same = r.cluster_models == fedavg(rounds, stream);
    ok = ok && same;
    o.detail += std::string(to_string(a)) + (same ? " ok" : " DIFFERS") + "; ";
    std::cerr << "  reduction " << to_string(a) << (same ? " matches" : " differs") << "\n";
  }
  o.detail += "seed " + std::to_string(cfg.seed) + ", SRFCA has no K and is not compared";
  o.passed = ok;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale acceptance run"};
  std::string config_path = QSFL_DESK_CONFIG;
  std::string store = "acceptance_store";
  bool reuse = false;
  std::size_t client_workers = 1;
  app.add_option("--config", config_path, "Desk config (JSON)");
  app.add_option("--store", store, "Scratch directory for run records");
  app.add_flag("--reuse", reuse, "Keep existing records instead of starting clean");
  app.add_option("--client-workers", client_workers, "Client threads inside each run");
  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = load_config(config_path);
    const fs::path first = fs::path(store) / "first", second = fs::path(store) / "second";
    if (!reuse) fs::remove_all(store);

    const auto cells = desk_cells(cfg);
    std::cerr << "desk sweep: " << cells.size() << " cells on " << cfg.datasets.at(0).dir
              << "\n";
    RunOptions opts;
    opts.out_dir = first;
    opts.workers = 1;
    opts.client_workers = client_workers;
    opts.log = [](const std::string& line) { std::cerr << "  " << line << "\n"; };
    const auto t0 = Clock::now();
    const RunSummary sweep = run_all(cells, opts);
    std::cerr << "sweep took " << fmt(seconds_since(t0), 0) << " s\n";

    const Store records(load_store(first));
    for (ReportKind k : all_report_kinds()) write_report(first, records.all(), k);

    std::vector<Outcome> out;
    out.push_back(criterion_recovery(records));
    out.push_back(criterion_gap(records));
    out.push_back(criterion_fragility(records));
    out.push_back(criterion_robustness(records));
    out.push_back(criterion_sensitivity(records));
    for (auto& o : criteria_oracles(20261016)) out.push_back(std::move(o));

    {
      Outcome o{8, "determinism: full sweep rerun with other worker counts is byte identical"};
      RunOptions again = opts;
      again.out_dir = second;
      again.workers = 3;
      again.client_workers = client_workers + 1;
      again.force = true;
      const auto t1 = Clock::now();
      run_all(cells, again);
      const auto a = store_bytes(first), b = store_bytes(second);
      std::size_t differing = 0;
      for (const auto& [path, bytes] : a) {
        const auto it = b.find(path);
        if (it == b.end() || it->second != bytes) ++differing;
      }
      o.passed = sweep.failed == 0 && a.size() == cells.size() && b.size() == a.size() &&
                 differing == 0;
      o.detail = std::to_string(a.size()) + " records, " + std::to_string(differing) +
                 " differ (workers 1/" + std::to_string(client_workers) + " vs 3/" +
                 std::to_string(client_workers + 1) + ", rerun " +
                 fmt(seconds_since(t1), 0) + " s)";
      out.push_back(o);
    }
    out.push_back(criterion_reductions(cfg, client_workers));

    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    bool all = true;
    for (const auto& o : out) {
      std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << o.id << ": " << o.title
                << "\n     " << o.detail << "\n";
      all = all && o.passed;
    }
    std::cout << (all ? "all criteria passed" : "some criteria failed") << std::endl;
    return all ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << "\n";
    return 2;
  }
}
