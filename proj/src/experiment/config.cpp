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

#include "qsfl/experiment/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qsfl/error.hpp"
#include "qsfl/random.hpp"

#ifndef QSFL_DEFAULT_DATA_DIR
#define QSFL_DEFAULT_DATA_DIR "data/mnist-subset"
#endif

namespace qsfl {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::string_view section, std::set<std::string> allowed) {
  if (!j.is_object()) throw ConfigError("config section '" + std::string(section) + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError("unknown config key '" + std::string(section) + "." + key + "'");
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <typename T, typename Parse>
void read_enum_list(const json& j, const char* key, std::vector<T>& out, Parse parse) {
  if (!j.contains(key)) return;
  out.clear();
  for (const auto& v : j.at(key)) out.push_back(parse(v.get<std::string>()));
}

}  // namespace

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv(kDataDirEnv); env != nullptr && *env != '\0') return env;
  return QSFL_DEFAULT_DATA_DIR;
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.datasets = {{"mnist", default_data_dir()}};
  return c;
}

void ExperimentConfig::validate() const {
  if (datasets.empty()) throw ConfigError("no datasets configured");
  std::set<std::string> names;
  for (const auto& d : datasets) {
    if (d.name.empty()) throw ConfigError("dataset name must not be empty");
    if (!names.insert(d.name).second) throw ConfigError("duplicate dataset name '" + d.name + "'");
  }
  if (heterogeneity.empty() || qs.empty() || algorithms.empty()) {
    throw ConfigError("grid lists must not be empty");
  }
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (clusters.empty()) throw ConfigError("at least one cluster count is required");
  if (base.num_clients < 1) throw ConfigError("num_clients must be >= 1");
  if (base.het_classes < 1 || base.het_classes > base.num_clients) {
    throw ConfigError("het_classes must be in [1, num_clients]");
  }
  if (base.samples_per_label < 1) throw ConfigError("samples_per_label must be >= 1");
  if (base.algo.rounds < 1) throw ConfigError("rounds must be >= 1");
  base.algo.train.validate();
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  ExperimentConfig c = default_config();
  try {
    const json root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    reject_unknown(root, "", {"data", "grid", "scenario", "train", "algo", "run"});
    if (root.contains("data")) {
      const json& d = root.at("data");
      reject_unknown(d, "data", {"datasets"});
      if (d.contains("datasets")) {
        c.datasets.clear();
        for (const auto& e : d.at("datasets")) {
          reject_unknown(e, "data.datasets[]", {"name", "dir"});
          DatasetRef ref{e.value("name", std::string("mnist")), default_data_dir()};
          if (e.contains("dir")) {
            ref.dir = e.at("dir").get<std::string>();
            if (ref.dir.is_relative()) ref.dir = base_dir / ref.dir;
          }
          c.datasets.push_back(std::move(ref));
        }
      }
    }
    if (root.contains("grid")) {
      const json& g = root.at("grid");
      reject_unknown(g, "grid", {"heterogeneity", "qs", "algorithms", "seeds", "clusters"});
      read_enum_list(g, "heterogeneity", c.heterogeneity, parse_heterogeneity);
      read_enum_list(g, "qs", c.qs, parse_qs);
      read_enum_list(g, "algorithms", c.algorithms, parse_algorithm);
      read(g, "seeds", c.seeds);
      read(g, "clusters", c.clusters);
    }
    ScenarioSpec& s = c.base;
    if (root.contains("scenario")) {
      const json& j = root.at("scenario");
      reject_unknown(j, "scenario", {"num_clients", "het_classes", "het_variant",
                                     "samples_per_label", "qs_group_sizes", "permute_qs2"});
      read(j, "num_clients", s.num_clients);
      read(j, "het_classes", s.het_classes);
      read(j, "het_variant", s.het_variant);
      read(j, "samples_per_label", s.samples_per_label);
      read(j, "qs_group_sizes", s.qs_group_sizes);
      read(j, "permute_qs2", s.permute_qs2);
    }
    if (root.contains("train")) {
      const json& j = root.at("train");
      reject_unknown(j, "train", {"rounds", "local_epochs", "learning_rate", "batch_size",
                                  "layer_sizes"});
      read(j, "rounds", s.algo.rounds);
      read(j, "local_epochs", s.algo.train.local_epochs);
      read(j, "learning_rate", s.algo.train.learning_rate);
      read(j, "batch_size", s.algo.train.batch_size);
      read(j, "layer_sizes", s.algo.layer_sizes);
    }
    if (root.contains("algo")) {
      const json& j = root.at("algo");
      reject_unknown(j, "algo", {"clustering_round", "ifca_restarts", "ifca_selection",
                                 "prox_mu", "trim_fraction", "srfca_quantile_low",
                                 "srfca_quantile_high", "srfca_grid_points", "edc_directions",
                                 "kmeans_max_iter", "stream"});
      read(j, "clustering_round", s.algo.clustering_round);
      read(j, "ifca_restarts", s.algo.ifca_restarts);
      if (j.contains("ifca_selection")) {
        const auto sel = j.at("ifca_selection").get<std::string>();
        if (sel == "train_accuracy") {
          s.algo.ifca_selection = IfcaSelection::kTrainAccuracy;
        } else if (sel == "train_loss") {
          s.algo.ifca_selection = IfcaSelection::kTrainLoss;
        } else {
          throw ConfigError("ifca_selection must be train_accuracy or train_loss");
        }
      }
      read(j, "prox_mu", s.algo.prox_mu);
      read(j, "trim_fraction", s.algo.trim_fraction);
      read(j, "srfca_quantile_low", s.algo.srfca_quantile_low);
      read(j, "srfca_quantile_high", s.algo.srfca_quantile_high);
      read(j, "srfca_grid_points", s.algo.srfca_grid_points);
      read(j, "edc_directions", s.algo.edc_directions);
      read(j, "kmeans_max_iter", s.algo.kmeans_max_iter);
      read(j, "stream", s.algo.stream);
    }
    if (root.contains("run")) {
      const json& j = root.at("run");
      reject_unknown(j, "run", {"out_dir", "workers", "client_workers", "seed_offset"});
      if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
      read(j, "workers", c.workers);
      read(j, "client_workers", c.client_workers);
      read(j, "seed_offset", c.seed_offset);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string config_json(const ExperimentConfig& cfg) {
  json j;
  for (const auto& d : cfg.datasets) j["datasets"].push_back(d.name);
  for (auto h : cfg.heterogeneity) j["heterogeneity"].push_back(to_string(h));
  for (auto q : cfg.qs) j["qs"].push_back(to_string(q));
  for (auto a : cfg.algorithms) j["algorithms"].push_back(to_string(a));
  j["seeds"] = cfg.seeds;
  j["clusters"] = cfg.clusters;
  j["seed_offset"] = cfg.seed_offset;
  j["base"] = json::parse(scenario_json(cfg.base));
  return j.dump();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) { return fnv1a64(config_json(cfg)); }

}  // namespace qsfl
