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

#include "qsfl/clustering/edc.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "qsfl/error.hpp"

namespace qsfl {

EdcFeatures edc_features(const RowMatrix<double>& updates, int num_directions) {
  const Index n = updates.rows();
  const Index m = num_directions;
  if (m < 1 || m > n) {
    throw ConfigError("EDC needs 1 <= directions <= clients (got " + std::to_string(m) + " for " +
                      std::to_string(n) + ")");
  }
  const Eigen::MatrixXd gram = updates * updates.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::VectorXd norms = updates.rowwise().norm();
  const double top = std::max(eig.eigenvalues().maxCoeff(), 0.0);

  EdcFeatures out;
  out.features = RowMatrix<double>::Ones(n, m);
  for (Index i = 0; i < n; ++i) {
    if (norms[i] == 0.0) out.zero_norm.push_back(static_cast<int>(i));
  }
  for (Index j = 0; j < m; ++j) {
    const Index col = n - 1 - j;  // eigenvalues ascend
    const double lambda = eig.eigenvalues()[col];
    if (!(lambda > 1e-24 * top) || top == 0.0) continue;
    Eigen::VectorXd a = eig.eigenvectors().col(col);
    Index lead = 0;
    for (Index i = 1; i < n; ++i) {
      if (std::abs(a[i]) > std::abs(a[lead])) lead = i;
    }
    if (a[lead] < 0) a = -a;
    const double sigma = std::sqrt(lambda);
    for (Index i = 0; i < n; ++i) {
      if (norms[i] == 0.0) continue;
      const double cos = std::clamp(sigma * a[i] / norms[i], -1.0, 1.0);
      out.features(i, j) = 1.0 - cos;
    }
  }
  return out;
}

}  // namespace qsfl
