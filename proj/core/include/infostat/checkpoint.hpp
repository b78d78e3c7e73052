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

#ifndef INFOSTAT_CHECKPOINT_HPP_
#define INFOSTAT_CHECKPOINT_HPP_

#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

#include "infostat/model.hpp"

namespace infostat {

inline constexpr std::string_view kCheckpointVersion = "infostat-ckpt-1";
inline constexpr std::string_view kManifestFile = "manifest.json";
inline constexpr std::string_view kTensorFile = "tensors.bin";

// A checkpoint is a directory holding manifest.json (version, config, tensor
// names, shapes, byte offsets, endianness) and tensors.bin (little-endian
// IEEE-754 doubles in manifest order). `metadata` is free-form and is
// round-tripped untouched.
struct Checkpoint {
  ModelConfig config;
  Parameters params;
  nlohmann::json metadata = nlohmann::json::object();
};

void save_checkpoint(const Parameters& params, const ModelConfig& config,
                     const std::filesystem::path& dir,
                     const nlohmann::json& metadata = nlohmann::json::object());

// Throws CheckpointError: "corrupt checkpoint" for unreadable / short data,
// "shape mismatch" naming the tensor when the manifest disagrees with config.
Checkpoint load_checkpoint(const std::filesystem::path& dir);

nlohmann::json model_config_to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& j);

}  // namespace infostat

#endif  // INFOSTAT_CHECKPOINT_HPP_
