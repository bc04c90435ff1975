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

#include <span>

namespace qsfl {

// Adjusted Rand Index from the contingency table of two labelings. Pair counts
// are accumulated in integers, so ari(a, b) == ari(b, a) exactly. When both
// partitions are trivial in the same way (one cluster each, or all
// singletons) the index is 1.
double adjusted_rand_index(std::span<const int> truth, std::span<const int> pred);

}  // namespace qsfl
