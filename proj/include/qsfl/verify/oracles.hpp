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

// Reference implementations written independently of the library code they
// check: pair enumeration for ARI, exhaustive greedy agglomeration for Ward,
// sort-and-drop for the trimmed mean, central differences for gradients.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qsfl/nn/mlp.hpp"

namespace qsfl::oracle {

// ARI from the four pair counts (same/different cluster in each labeling).
double ari_pairs(std::span<const int> a, std::span<const int> b);

struct GreedyStep {
  double height = 0.0;           // sqrt(2 * increase in within-cluster SSE)
  std::vector<int> labels;       // partition after the merge, canonical labels
};

// Repeatedly merges the pair of clusters whose union increases the total
// within-cluster sum of squares least, recomputing every SSE from the points.
std::vector<GreedyStep> ward_greedy(const RowMatrix<double>& points);

// Per coordinate: sort, drop ceil(beta * n) from each end, average the rest.
std::vector<double> trimmed_mean(const std::vector<std::vector<double>>& rows, double beta);

// Central-difference gradient of mean cross-entropy (+ mu/2 |w - anchor|^2).
std::vector<double> numeric_gradient(const Model& model, const RowMatrix<double>& batch,
                                     std::span<const int> labels, const Model* anchor,
                                     double mu, double step = 1e-6);

struct CheckResult {
  std::string name;
  bool passed = false;
  int trials = 0;
  double worst = 0.0;  // largest observed error
  std::string detail;
};

CheckResult check_ari(std::uint64_t seed, int trials = 1000, double tol = 1e-12);
CheckResult check_ward(std::uint64_t seed, int trials = 100, int max_points = 7);
CheckResult check_trimmed_mean(std::uint64_t seed, int trials = 100, double tol = 1e-12);
CheckResult check_duplication(std::uint64_t seed, int trials = 100, double tol = 1e-12);
CheckResult check_gradients(std::uint64_t seed, int draws = 100, double tol = 1e-4);

std::vector<CheckResult> run_suite(std::uint64_t seed);

}  // namespace qsfl::oracle
