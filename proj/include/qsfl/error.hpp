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

#include <stdexcept>
#include <string>

namespace qsfl {

// Invalid parameters, shapes or settings. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or insufficient input data. Maps to CLI exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed dataset file; the message names the offending file.
class IngestionError : public DataError {
 public:
  using DataError::DataError;
};

// Raised by aggregation when a cluster has no members. Drivers catch it and
// carry the previous cluster model over.
class EmptyClusterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qsfl
