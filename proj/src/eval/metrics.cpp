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

#include "qsfl/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "qsfl/error.hpp"

namespace qsfl {

namespace {

double mean(std::span<const double> v) {
  if (v.empty()) throw DataError("mean of an empty set");
  // Sorted summation keeps results independent of record order.
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

std::vector<const RunRecord*> ok_records(std::span<const RunRecord> records) {
  std::vector<const RunRecord*> out;
  for (const auto& r : records) {
    if (r.ok()) out.push_back(&r);
  }
  return out;
}

}  // namespace

double global_accuracy(std::span<const double> per_client) { return mean(per_client); }

double global_accuracy(const RunRecord& r) { return global_accuracy(r.per_client_accuracy); }

double population_std(std::span<const double> values) {
  const double m = mean(values);
  std::vector<double> sq;
  for (double v : values) sq.push_back((v - m) * (v - m));
  return std::sqrt(mean(sq));
}

double client_acc_std(const RunRecord& r) { return population_std(r.per_client_accuracy); }

double delta_ari(std::span<const RunRecord> nonqs, std::span<const RunRecord> qs) {
  std::map<std::string, double> base;
  for (const auto* r : ok_records(nonqs)) {
    if (!base.emplace(scenario_key(r->scenario, false, true), r->ari).second) {
      throw ConfigError("duplicate scenario among non-QS records");
    }
  }
  std::set<std::string> used;
  std::vector<double> diffs;
  for (const auto* r : ok_records(qs)) {
    const std::string key = scenario_key(r->scenario, false, true);
    if (!used.insert(key).second) throw ConfigError("duplicate scenario among QS records");
    const auto it = base.find(key);
    if (it != base.end()) diffs.push_back(it->second - r->ari);
  }
  if (diffs.empty()) throw DataError("no aligned non-QS / QS record pairs");
  return mean(diffs);
}

std::vector<double> descending_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

namespace {

// scenario key -> algorithm -> global accuracy
std::map<std::string, std::map<std::string, double>> by_scenario(
    std::span<const RunRecord> records) {
  std::map<std::string, std::map<std::string, double>> groups;
  for (const auto* r : ok_records(records)) {
    auto& g = groups[scenario_key(r->scenario, true, false)];
    if (!g.emplace(std::string(to_string(r->algorithm())), global_accuracy(*r)).second) {
      throw ConfigError("duplicate record for " + std::string(to_string(r->algorithm())) +
                        " in one scenario");
    }
  }
  return groups;
}

}  // namespace

std::map<std::string, double> average_rank(std::span<const RunRecord> records) {
  std::map<std::string, std::vector<double>> ranks;
  for (const auto& [key, accs] : by_scenario(records)) {
    if (accs.size() < 2) continue;
    std::vector<double> values;
    for (const auto& [algo, acc] : accs) values.push_back(acc);
    const auto r = descending_ranks(values);
    std::size_t i = 0;
    for (const auto& [algo, acc] : accs) ranks[algo].push_back(r[i++]);
  }
  if (ranks.empty()) throw DataError("no scenario holds two or more algorithms");
  std::map<std::string, double> out;
  for (const auto& [algo, v] : ranks) out[algo] = mean(v);
  return out;
}

WinrateMatrix winrate_matrix(std::span<const RunRecord> records) {
  const auto groups = by_scenario(records);
  std::set<std::string> names;
  for (const auto& [key, accs] : groups) {
    for (const auto& [algo, acc] : accs) names.insert(algo);
  }
  if (names.empty()) throw DataError("no successful records");
  WinrateMatrix m;
  m.algorithms.assign(names.begin(), names.end());
  const auto A = static_cast<Index>(m.algorithms.size());
  Eigen::MatrixXd wins = Eigen::MatrixXd::Zero(A, A);
  m.comparisons = Eigen::MatrixXi::Zero(A, A);
  for (const auto& [key, accs] : groups) {
    for (Index i = 0; i < A; ++i) {
      const auto ai = accs.find(m.algorithms[i]);
      if (ai == accs.end()) continue;
      for (Index j = 0; j < A; ++j) {
        const auto aj = accs.find(m.algorithms[j]);
        if (i == j || aj == accs.end()) continue;
        ++m.comparisons(i, j);
        wins(i, j) += ai->second > aj->second ? 1.0 : ai->second == aj->second ? 0.5 : 0.0;
      }
    }
  }
  m.rate.resize(A, A);
  for (Index i = 0; i < A; ++i) {
    for (Index j = 0; j < A; ++j) {
      m.rate(i, j) = (i == j || m.comparisons(i, j) == 0)
                         ? std::numeric_limits<double>::quiet_NaN()
                         : wins(i, j) / m.comparisons(i, j);
    }
  }
  return m;
}

AggregateCell aggregate_cell(std::span<const RunRecord> records) {
  std::vector<double> acc, cstd, ari;
  for (const auto* r : ok_records(records)) {
    acc.push_back(global_accuracy(*r));
    cstd.push_back(client_acc_std(*r));
    ari.push_back(r->ari);
  }
  if (acc.empty()) throw DataError("no successful records to aggregate");
  AggregateCell c;
  c.count = static_cast<int>(acc.size());
  c.acc_mean = mean(acc);
  c.acc_std = population_std(acc);
  c.client_std_mean = mean(cstd);
  c.client_std_std = population_std(cstd);
  c.ari_mean = mean(ari);
  c.ari_std = population_std(ari);
  return c;
}

}  // namespace qsfl
