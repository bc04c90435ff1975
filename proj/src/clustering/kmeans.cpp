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

#include "qsfl/clustering/kmeans.hpp"

namespace qsfl {

RowMatrix<double> stack_models(std::span<const Model> models) {
  if (models.empty()) return {};
  RowMatrix<double> out(static_cast<Index>(models.size()), models.front().num_params());
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (!models[i].same_shape(models.front())) throw ConfigError("stacked models differ in shape");
    out.row(static_cast<Index>(i)) = models[i].values().transpose();
  }
  return out;
}

template KMeansResult<double> kmeans<double>(const RowMatrix<double>&, int, std::uint64_t, int);

}  // namespace qsfl
