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

#include "run_config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "infostat/errors.hpp"

namespace infostat::cli {
namespace {

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed config " + path + ": " + e.what());
  }
}

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object()) throw InputError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      throw InputError("unknown config key \"" + key + "\" in " + where);
    }
  }
}

template <typename T>
void take(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void apply_preset(const std::string& name, RunConfig& c) {
  if (name == "desk") {
    c.model = desk_preset();
    c.train = TrainConfig{};
  } else if (name == "paper") {
    c.model = paper_preset();
    c.train = paper_train_preset();
  } else {
    throw InputError("unknown preset \"" + name + "\" (expected desk or paper)");
  }
  c.preset = name;
}

}  // namespace

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("INFOSTAT_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (errno != 0 || *end != '\0' || raw[0] == '-') {
    throw InputError(std::string("INFOSTAT_SEED is not an unsigned integer: ") + raw);
  }
  return v;
}

nlohmann::ordered_json run_config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["corpus"] = c.corpus;
  j["mode"] = context_kind_name(c.mode.kind);
  j["window"] = c.mode.prev_sentence_window;
  j["preset"] = c.preset;
  j["model"] = {{"n_layers", c.model.n_layers},
                {"d_model", c.model.d_model},
                {"n_heads", c.model.n_heads},
                {"d_ff", c.model.d_ff},
                {"max_len", c.model.max_len},
                {"dropout_rate", c.model.dropout_rate}};
  j["train"] = {{"epochs", c.train.epochs},
                {"learning_rate", c.train.learning_rate},
                {"batch_size", c.train.batch_size},
                {"beta1", c.train.beta1},
                {"beta2", c.train.beta2},
                {"epsilon", c.train.epsilon},
                {"weight_decay", c.train.weight_decay},
                {"grad_clip_norm", c.train.grad_clip_norm}};
  j["k"] = c.k;
  j["seed"] = c.seed;
  j["min_freq"] = c.min_freq;
  j["out_dir"] = c.out_dir;
  return j;
}

void apply_run_config_json(const nlohmann::json& j, RunConfig& c) {
  check_keys(j,
             {"command", "corpus", "mode", "window", "preset", "model", "train", "k",
              "seed", "min_freq", "jobs", "out_dir"},
             "config");
  try {
    take(j, "corpus", c.corpus);
    if (j.contains("mode")) c.mode.kind = parse_context_kind(j.at("mode").get<std::string>());
    take(j, "window", c.mode.prev_sentence_window);
    if (j.contains("model")) {
      const auto& m = j.at("model");
      check_keys(m, {"n_layers", "d_model", "n_heads", "d_ff", "max_len", "dropout_rate"},
                 "config.model");
      take(m, "n_layers", c.model.n_layers);
      take(m, "d_model", c.model.d_model);
      take(m, "n_heads", c.model.n_heads);
      take(m, "d_ff", c.model.d_ff);
      take(m, "max_len", c.model.max_len);
      take(m, "dropout_rate", c.model.dropout_rate);
    }
    if (j.contains("train")) {
      const auto& t = j.at("train");
      check_keys(t,
                 {"epochs", "learning_rate", "batch_size", "beta1", "beta2",
                  "epsilon", "weight_decay", "grad_clip_norm"},
                 "config.train");
      take(t, "epochs", c.train.epochs);
      take(t, "learning_rate", c.train.learning_rate);
      take(t, "batch_size", c.train.batch_size);
      take(t, "beta1", c.train.beta1);
      take(t, "beta2", c.train.beta2);
      take(t, "epsilon", c.train.epsilon);
      take(t, "weight_decay", c.train.weight_decay);
      take(t, "grad_clip_norm", c.train.grad_clip_norm);
    }
    take(j, "k", c.k);
    take(j, "seed", c.seed);
    take(j, "min_freq", c.min_freq);
    take(j, "jobs", c.jobs);
    take(j, "out_dir", c.out_dir);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad config value: ") + e.what());
  }
}

RunConfig resolve_run_config(const Overrides& f) {
  RunConfig c;
  nlohmann::json file = nlohmann::json::object();
  if (!f.config_path.empty()) file = read_json_file(f.config_path);
  if (!file.is_object()) throw InputError("config must be a JSON object");

  std::string preset = "desk";
  if (file.contains("preset")) {
    if (!file.at("preset").is_string()) throw InputError("config preset must be a string");
    preset = file.at("preset").get<std::string>();
  }
  if (f.paper_scale) preset = "paper";
  apply_preset(preset, c);
  std::optional<std::uint64_t> seed = env_seed();
  apply_run_config_json(file, c);
  if (file.contains("seed")) seed = c.seed;

  if (f.corpus) c.corpus = *f.corpus;
  if (f.mode) c.mode.kind = parse_context_kind(*f.mode);
  if (f.window) c.mode.prev_sentence_window = *f.window;
  if (f.n_layers) c.model.n_layers = *f.n_layers;
  if (f.d_model) c.model.d_model = *f.d_model;
  if (f.n_heads) c.model.n_heads = *f.n_heads;
  if (f.d_ff) c.model.d_ff = *f.d_ff;
  if (f.max_len) c.model.max_len = *f.max_len;
  if (f.dropout) c.model.dropout_rate = *f.dropout;
  if (f.epochs) c.train.epochs = *f.epochs;
  if (f.learning_rate) c.train.learning_rate = *f.learning_rate;
  if (f.batch_size) c.train.batch_size = *f.batch_size;
  if (f.weight_decay) c.train.weight_decay = *f.weight_decay;
  if (f.k) c.k = *f.k;
  if (f.seed) seed = *f.seed;
  if (f.min_freq) c.min_freq = *f.min_freq;
  if (f.jobs) c.jobs = *f.jobs;
  if (f.out_dir) c.out_dir = *f.out_dir;

  c.seed = seed.value_or(1);
  c.train.seed = c.seed;
  if (c.mode.prev_sentence_window < 0) throw InputError("window must be >= 0");
  if (c.k < 2) throw InputError("k must be >= 2");
  if (c.min_freq < 1) throw InputError("min_freq must be >= 1");
  if (c.jobs < 1) throw InputError("jobs must be >= 1");
  c.model.validate();
  c.train.validate();
  return c;
}

}  // namespace infostat::cli
