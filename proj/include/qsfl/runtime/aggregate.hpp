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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "qsfl/error.hpp"
#include "qsfl/nn/mlp.hpp"

namespace qsfl {
namespace detail {

template <typename Scalar>
void check_models(std::span<const ModelParams<Scalar>* const> models) {
  if (models.empty()) throw EmptyClusterError("aggregation over an empty cluster");
  for (const auto* m : models) {
    if (!m->same_shape(*models.front())) throw ConfigError("aggregated models differ in shape");
  }
}

// Summation order is canonical (lexicographic on parameter values, then
// weight), so the result does not depend on how the caller ordered inputs.
template <typename Scalar>
std::vector<std::size_t> canonical_order(std::span<const ModelParams<Scalar>* const> models,
                                         std::span<const double> weights) {
  std::vector<std::size_t> order(models.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& va = models[a]->values();
    const auto& vb = models[b]->values();
    for (Index k = 0; k < va.size(); ++k) {
      if (va[k] != vb[k]) return va[k] < vb[k];
    }
    return weights[a] < weights[b];
  });
  return order;
}

}  // namespace detail

// Sum_i (|D_i| / Sum_j |D_j|) * w_i.
template <typename Scalar>
ModelParams<Scalar> aggregate_weighted(std::span<const ModelParams<Scalar>* const> models,
                                       std::span<const double> sizes) {
  detail::check_models(models);
  if (sizes.size() != models.size()) throw ConfigError("one size per model is required");
  for (double s : sizes) {
    if (!(s > 0.0)) throw ConfigError("aggregation sizes must be positive");
  }
  const auto order = detail::canonical_order(models, sizes);
  double total = 0.0;
  for (std::size_t i : order) total += sizes[i];
  ModelParams<Scalar> out(models.front()->sizes());
  for (std::size_t i : order) {
    out.values() += static_cast<Scalar>(sizes[i] / total) * models[i]->values();
  }
  return out;
}

// Plain mean; identical to aggregate_weighted with equal sizes.
template <typename Scalar>
ModelParams<Scalar> aggregate_uniform(std::span<const ModelParams<Scalar>* const> models) {
  const std::vector<double> ones(models.size(), 1.0);
  return aggregate_weighted(models, std::span<const double>(ones));
}

// Coordinate-wise trimmed mean: drops the ceil(beta * n) smallest and largest
// values of every coordinate and averages the rest.
template <typename Scalar>
ModelParams<Scalar> aggregate_trimmed(std::span<const ModelParams<Scalar>* const> models,
                                      double trim_fraction) {
  detail::check_models(models);
  const std::size_t n = models.size();
  if (!(trim_fraction >= 0.0 && trim_fraction < 0.5)) {
    throw ConfigError("trim fraction must be in [0, 0.5)");
  }
  const auto cut = static_cast<std::size_t>(std::ceil(trim_fraction * n - 1e-9));
  if (2 * cut >= n) {
    throw ConfigError("trim fraction " + std::to_string(trim_fraction) + " removes all " +
                      std::to_string(n) + " values");
  }
  ModelParams<Scalar> out(models.front()->sizes());
  std::vector<Scalar> column(n);
  const Scalar kept = static_cast<Scalar>(n - 2 * cut);
  for (Index k = 0; k < out.num_params(); ++k) {
    for (std::size_t i = 0; i < n; ++i) column[i] = models[i]->values()[k];
    std::sort(column.begin(), column.end());
    Scalar sum = 0;
    for (std::size_t i = cut; i < n - cut; ++i) sum += column[i];
    out.values()[k] = sum / kept;
  }
  return out;
}

// Convenience overloads over contiguous model lists.
template <typename Scalar>
std::vector<const ModelParams<Scalar>*> pointers(std::span<const ModelParams<Scalar>> models) {
  std::vector<const ModelParams<Scalar>*> out;
  out.reserve(models.size());
  for (const auto& m : models) out.push_back(&m);
  return out;
}

template <typename Scalar>
ModelParams<Scalar> aggregate_weighted(const std::vector<ModelParams<Scalar>>& models,
                                       std::span<const double> sizes) {
  const auto p = pointers(std::span<const ModelParams<Scalar>>(models));
  return aggregate_weighted(std::span<const ModelParams<Scalar>* const>(p), sizes);
}

template <typename Scalar>
ModelParams<Scalar> aggregate_uniform(const std::vector<ModelParams<Scalar>>& models) {
  const auto p = pointers(std::span<const ModelParams<Scalar>>(models));
  return aggregate_uniform(std::span<const ModelParams<Scalar>* const>(p));
}

template <typename Scalar>
ModelParams<Scalar> aggregate_trimmed(const std::vector<ModelParams<Scalar>>& models,
                                      double trim_fraction) {
  const auto p = pointers(std::span<const ModelParams<Scalar>>(models));
  return aggregate_trimmed(std::span<const ModelParams<Scalar>* const>(p), trim_fraction);
}

}  // namespace qsfl
