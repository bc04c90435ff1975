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

#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qsfl/eval/record.hpp"

namespace qsfl {

// Unweighted mean of per-client test accuracies.
double global_accuracy(std::span<const double> per_client);
double global_accuracy(const RunRecord& r);

// Population standard deviation (divides by n).
double population_std(std::span<const double> values);
double client_acc_std(const RunRecord& r);

// Mean over aligned pairs of ARI(non-QS) - ARI(QS). Records pair up when
// their scenarios agree on everything but the QS kind (so dataset,
// heterogeneity and seed, plus algorithm and K). Unpaired records are
// ignored; no pair at all is an error.
double delta_ari(std::span<const RunRecord> nonqs, std::span<const RunRecord> qs);

// Fractional ranks, 1 = highest value; tied values share their mean rank.
std::vector<double> descending_ranks(std::span<const double> values);

// Mean accuracy rank per algorithm across scenarios. Records are grouped by
// scenario without the algorithm; groups holding fewer than two algorithms
// are skipped.
std::map<std::string, double> average_rank(std::span<const RunRecord> records);

struct WinrateMatrix {
  std::vector<std::string> algorithms;  // row / column order
  Eigen::MatrixXd rate;                 // NaN on the diagonal and for pairs never compared
  Eigen::MatrixXi comparisons;
};

// rate(i, j): fraction of aligned scenarios where algorithm i's global
// accuracy beats j's; ties count 0.5.
WinrateMatrix winrate_matrix(std::span<const RunRecord> records);

struct AggregateCell {
  int count = 0;
  double acc_mean = 0.0;
  double acc_std = 0.0;
  double client_std_mean = 0.0;
  double client_std_std = 0.0;
  double ari_mean = 0.0;
  double ari_std = 0.0;
};

// Mean and population std over the given records (typically the seeds of one
// scenario and algorithm).
AggregateCell aggregate_cell(std::span<const RunRecord> records);

}  // namespace qsfl
