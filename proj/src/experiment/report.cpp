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

#include "qsfl/experiment/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "qsfl/error.hpp"
#include "qsfl/eval/metrics.hpp"

namespace qsfl {

namespace fs = std::filesystem;

std::string_view to_string(ReportKind k) {
  switch (k) {
    case ReportKind::kTables: return "tables";
    case ReportKind::kDeltaHeatmap: return "delta_heatmap";
    case ReportKind::kWinrate: return "winrate";
    case ReportKind::kRank: return "rank";
    case ReportKind::kSensitivity: return "sensitivity";
  }
  return "?";
}

ReportKind parse_report_kind(std::string_view s) {
  for (auto k : all_report_kinds()) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown report kind '" + std::string(s) + "'");
}

std::vector<ReportKind> all_report_kinds() {
  return {ReportKind::kTables, ReportKind::kDeltaHeatmap, ReportKind::kWinrate, ReportKind::kRank,
          ReportKind::kSensitivity};
}

std::vector<RunRecord> load_store(const fs::path& out_dir) {
  const fs::path runs = out_dir / "runs";
  std::vector<fs::path> files;
  if (fs::is_directory(runs)) {
    for (const auto& e : fs::recursive_directory_iterator(runs)) {
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
  }
  if (files.empty()) throw DataError("results store " + runs.string() + " is empty");
  std::sort(files.begin(), files.end());
  std::vector<RunRecord> out;
  for (const auto& f : files) out.push_back(read_record(f));
  return out;
}

namespace {

std::string full(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed2(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string pm(double mean, double sd, double scale) {
  return fixed2(mean * scale) + "±" + fixed2(sd * scale);
}

using GroupKey = std::tuple<std::string, std::string, std::string, int>;  // dataset, het, qs, K

GroupKey group_of(const RunRecord& r) {
  return {r.scenario.dataset, std::string(to_string(r.scenario.heterogeneity)),
          std::string(to_string(r.scenario.qs)), r.scenario.algo.num_clusters};
}

std::vector<RunRecord> successful(std::span<const RunRecord> records) {
  std::vector<RunRecord> out;
  for (const auto& r : records) {
    if (r.ok()) out.push_back(r);
  }
  if (out.empty()) throw DataError("no successful records to report");
  return out;
}

std::string tables(std::span<const RunRecord> all) {
  const auto records = successful(all);
  std::map<GroupKey, std::map<std::string, std::vector<RunRecord>>> groups;
  for (const auto& r : records) groups[group_of(r)][std::string(to_string(r.algorithm()))].push_back(r);
  std::ostringstream out;
  out << "dataset,heterogeneity,qs,K,algorithm,seeds,acc_mean,acc_std,client_std_mean,"
         "client_std_std,ari_mean,ari_std,rank_mean,acc_display,client_std_display,"
         "ari_display\n";
  for (const auto& [key, algos] : groups) {
    std::vector<RunRecord> group;
    for (const auto& [a, recs] : algos) group.insert(group.end(), recs.begin(), recs.end());
    std::map<std::string, double> ranks;
    if (algos.size() > 1) ranks = average_rank(group);
    for (const auto& [algo, recs] : algos) {
      const AggregateCell c = aggregate_cell(recs);
      const double rank = ranks.contains(algo) ? ranks.at(algo) : std::nan("");
      out << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
          << std::get<3>(key) << ',' << algo << ',' << c.count << ',' << full(c.acc_mean) << ','
          << full(c.acc_std) << ',' << full(c.client_std_mean) << ',' << full(c.client_std_std)
          << ',' << full(c.ari_mean) << ',' << full(c.ari_std) << ',' << full(rank) << ','
          << pm(c.acc_mean, c.acc_std, 100.0) << ','
          << pm(c.client_std_mean, c.client_std_std, 100.0) << ','
          << pm(c.ari_mean, c.ari_std, 1.0) << '\n';
    }
  }
  return out.str();
}

std::string delta_heatmap(std::span<const RunRecord> all) {
  const auto records = successful(all);
  // (dataset, het, K, algorithm) -> qs -> records
  using Key = std::tuple<std::string, std::string, int, std::string>;
  std::map<Key, std::map<QsKind, std::vector<RunRecord>>> groups;
  for (const auto& r : records) {
    groups[{r.scenario.dataset, std::string(to_string(r.scenario.heterogeneity)),
            r.scenario.algo.num_clusters, std::string(to_string(r.algorithm()))}][r.scenario.qs]
        .push_back(r);
  }
  std::ostringstream out;
  out << "dataset,heterogeneity,K,algorithm,delta_qs1,delta_qs2,delta_qs1_display,"
         "delta_qs2_display\n";
  // (K, algorithm) -> |delta| per dataset/heterogeneity for the average row
  std::map<std::pair<int, std::string>, std::pair<std::vector<double>, std::vector<double>>> abs;
  bool any = false;
  for (const auto& [key, by_qs] : groups) {
    if (!by_qs.contains(QsKind::kNonQs)) continue;
    const auto& base = by_qs.at(QsKind::kNonQs);
    auto delta = [&](QsKind q) {
      if (!by_qs.contains(q)) return std::nan("");
      try {
        return delta_ari(base, by_qs.at(q));
      } catch (const DataError&) {
        return std::nan("");
      }
    };
    const double d1 = delta(QsKind::kQs1), d2 = delta(QsKind::kQs2);
    if (std::isnan(d1) && std::isnan(d2)) continue;
    any = true;
    const auto& [dataset, het, k, algo] = key;
    out << dataset << ',' << het << ',' << k << ',' << algo << ',' << full(d1) << ',' << full(d2)
        << ',' << fixed2(d1) << ',' << fixed2(d2) << '\n';
    auto& acc = abs[{k, algo}];
    if (!std::isnan(d1)) acc.first.push_back(std::fabs(d1));
    if (!std::isnan(d2)) acc.second.push_back(std::fabs(d2));
  }
  if (!any) throw DataError("no aligned non-QS / QS records for a delta heatmap");
  auto mean = [](const std::vector<double>& v) {
    return v.empty() ? std::nan("") : global_accuracy(v);
  };
  for (const auto& [key, v] : abs) {
    const double m1 = mean(v.first), m2 = mean(v.second);
    out << "average_abs,," << key.first << ',' << key.second << ',' << full(m1) << ','
        << full(m2) << ',' << fixed2(m1) << ',' << fixed2(m2) << '\n';
  }
  return out.str();
}

std::string winrate(std::span<const RunRecord> all) {
  const auto records = successful(all);
  const WinrateMatrix m = winrate_matrix(records);
  std::ostringstream out;
  out << "row_algorithm,col_algorithm,winrate,comparisons,winrate_display\n";
  for (std::size_t i = 0; i < m.algorithms.size(); ++i) {
    for (std::size_t j = 0; j < m.algorithms.size(); ++j) {
      const double v = m.rate(static_cast<Index>(i), static_cast<Index>(j));
      out << m.algorithms[i] << ',' << m.algorithms[j] << ',' << full(v) << ','
          << m.comparisons(static_cast<Index>(i), static_cast<Index>(j)) << ','
          << fixed2(v * 100.0) << '\n';
    }
  }
  return out.str();
}

std::string rank(std::span<const RunRecord> all) {
  const auto records = successful(all);
  const auto ranks = average_rank(records);
  std::map<std::string, std::vector<RunRecord>> by_algo;
  for (const auto& r : records) by_algo[std::string(to_string(r.algorithm()))].push_back(r);
  std::vector<std::pair<double, std::string>> order;
  for (const auto& [algo, rk] : ranks) order.emplace_back(rk, algo);
  std::sort(order.begin(), order.end());
  std::ostringstream out;
  out << "algorithm,rank,acc_mean,acc_std,ari,rank_display\n";
  for (const auto& [rk, algo] : order) {
    const AggregateCell c = aggregate_cell(by_algo.at(algo));
    out << algo << ',' << full(rk) << ',' << full(c.acc_mean) << ',' << full(c.acc_std) << ','
        << full(c.ari_mean) << ',' << fixed2(rk) << '\n';
  }
  return out.str();
}

std::string sensitivity(std::span<const RunRecord> all) {
  const auto records = successful(all);
  using Key = std::tuple<std::string, std::string, std::string, std::string>;
  std::map<Key, std::map<int, std::vector<RunRecord>>> groups;
  for (const auto& r : records) {
    groups[{r.scenario.dataset, std::string(to_string(r.scenario.heterogeneity)),
            std::string(to_string(r.scenario.qs)), std::string(to_string(r.algorithm()))}]
          [r.scenario.algo.num_clusters]
              .push_back(r);
  }
  std::ostringstream out;
  out << "dataset,heterogeneity,qs,algorithm,K,seeds,acc_mean,acc_std,ari_mean,acc_display\n";
  bool any = false;
  for (const auto& [key, by_k] : groups) {
    if (by_k.size() < 2) continue;
    any = true;
    for (const auto& [k, recs] : by_k) {
      const AggregateCell c = aggregate_cell(recs);
      out << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
          << std::get<3>(key) << ',' << k << ',' << c.count << ',' << full(c.acc_mean) << ','
          << full(c.acc_std) << ',' << full(c.ari_mean) << ','
          << pm(c.acc_mean, c.acc_std, 100.0) << '\n';
    }
  }
  if (!any) throw DataError("no algorithm was run at more than one cluster count");
  return out.str();
}

}  // namespace

std::string report_csv(std::span<const RunRecord> records, ReportKind kind) {
  if (records.empty()) throw DataError("empty table: no records");
  switch (kind) {
    case ReportKind::kTables: return tables(records);
    case ReportKind::kDeltaHeatmap: return delta_heatmap(records);
    case ReportKind::kWinrate: return winrate(records);
    case ReportKind::kRank: return rank(records);
    case ReportKind::kSensitivity: return sensitivity(records);
  }
  throw ConfigError("unknown report kind");
}

fs::path write_report(const fs::path& out_dir, std::span<const RunRecord> records,
                      ReportKind kind) {
  const std::string csv = report_csv(records, kind);
  const fs::path path = out_dir / "reports" / (std::string(to_string(kind)) + ".csv");
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << csv;
  if (!out) throw DataError("cannot write " + path.string());
  return path;
}

}  // namespace qsfl
