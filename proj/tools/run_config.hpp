// Copyright 2026 The infostat Authors.
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

#ifndef INFOSTAT_TOOLS_RUN_CONFIG_HPP_
#define INFOSTAT_TOOLS_RUN_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "infostat/context.hpp"
#include "infostat/model.hpp"
#include "infostat/train.hpp"

namespace infostat::cli {

// Fully resolved settings of one run. `model.vocab_size` is filled from the
// vocabulary once it is built; `train.seed` always equals `seed`.
struct RunConfig {
  std::string corpus;
  ContextMode mode;
  std::string preset = "desk";
  ModelConfig model;
  TrainConfig train;
  int k = 10;
  std::uint64_t seed = 1;
  int min_freq = 1;
  int jobs = 1;
  std::string out_dir;
};

// Command-line values; unset ones fall back to the config file, then to the
// preset.
struct Overrides {
  std::string config_path;
  std::optional<std::string> corpus;
  std::optional<std::string> mode;
  std::optional<int> window;
  bool paper_scale = false;
  std::optional<int> n_layers;
  std::optional<int> d_model;
  std::optional<int> n_heads;
  std::optional<int> d_ff;
  std::optional<int> max_len;
  std::optional<double> dropout;
  std::optional<int> epochs;
  std::optional<double> learning_rate;
  std::optional<int> batch_size;
  std::optional<double> weight_decay;
  std::optional<int> k;
  std::optional<std::uint64_t> seed;
  std::optional<int> min_freq;
  std::optional<int> jobs;
  std::optional<std::string> out_dir;
};

// Seed precedence: flag, config file, INFOSTAT_SEED, 1.
RunConfig resolve_run_config(const Overrides& flags);

// Everything needed to rerun except `jobs`, which never changes results.
nlohmann::ordered_json run_config_json(const RunConfig& config);

// Accepts the output of run_config_json.
void apply_run_config_json(const nlohmann::json& j, RunConfig& config);

std::optional<std::uint64_t> env_seed();

}  // namespace infostat::cli

#endif  // INFOSTAT_TOOLS_RUN_CONFIG_HPP_
