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

#include "infostat/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "infostat/errors.hpp"

namespace infostat {
namespace {

static_assert(sizeof(double) == 8, "checkpoints store IEEE-754 binary64");

void put_le(std::string& out, double value) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(value);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>(bits & 0xff));
    bits >>= 8;
  }
}

double get_le(const char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) {
    bits = (bits << 8) | static_cast<unsigned char>(p[i]);
  }
  return std::bit_cast<double>(bits);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("corrupt checkpoint: cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

nlohmann::json model_config_to_json(const ModelConfig& c) {
  return nlohmann::ordered_json{
      {"n_layers", c.n_layers},   {"d_model", c.d_model},
      {"n_heads", c.n_heads},     {"d_ff", c.d_ff},
      {"max_len", c.max_len},     {"vocab_size", c.vocab_size},
      {"n_classes", c.n_classes}, {"dropout_rate", c.dropout_rate},
  };
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  try {
    c.n_layers = j.at("n_layers").get<int>();
    c.d_model = j.at("d_model").get<int>();
    c.n_heads = j.at("n_heads").get<int>();
    c.d_ff = j.at("d_ff").get<int>();
    c.max_len = j.at("max_len").get<int>();
    c.vocab_size = j.at("vocab_size").get<int>();
    c.n_classes = j.at("n_classes").get<int>();
    c.dropout_rate = j.at("dropout_rate").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad model config: ") + e.what());
  }
  c.validate();
  return c;
}

void save_checkpoint(const Parameters& params, const ModelConfig& config,
                     const std::filesystem::path& dir,
                     const nlohmann::json& metadata) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());

  std::string blob;
  blob.reserve(params.scalar_count() * 8);
  nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
  params.for_each([&](std::string_view name, const Matrix& m) {
    tensors.push_back({{"name", name},
                       {"shape", {m.rows(), m.cols()}},
                       {"offset", blob.size()},
                       {"bytes", m.size() * 8}});
    // Row-major storage, so the blob order is row by row.
    for (Eigen::Index i = 0; i < m.size(); ++i) put_le(blob, m.data()[i]);
  });

  nlohmann::ordered_json manifest;
  manifest["version"] = kCheckpointVersion;
  manifest["endianness"] = "little";
  manifest["dtype"] = "float64";
  manifest["config"] = model_config_to_json(config);
  manifest["tensors"] = std::move(tensors);
  manifest["total_bytes"] = blob.size();
  manifest["metadata"] = metadata;

  std::ofstream mf(dir / kManifestFile, std::ios::binary | std::ios::trunc);
  std::ofstream bf(dir / kTensorFile, std::ios::binary | std::ios::trunc);
  if (!mf || !bf) throw InputError("cannot write checkpoint in " + dir.string());
  mf << manifest.dump(2) << "\n";
  bf.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!mf || !bf) throw InputError("checkpoint write failed in " + dir.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(dir / kManifestFile));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint: manifest: ") + e.what());
  }
  if (manifest.value("version", "") != kCheckpointVersion) {
    throw CheckpointError("corrupt checkpoint: unsupported version");
  }
  if (manifest.value("endianness", "") != "little" ||
      manifest.value("dtype", "") != "float64") {
    throw CheckpointError("corrupt checkpoint: expected little-endian float64");
  }
  Checkpoint ckpt;
  try {
    ckpt.config = model_config_from_json(manifest.at("config"));
  } catch (const InputError& e) {
    throw CheckpointError(std::string("corrupt checkpoint: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint: ") + e.what());
  }
  if (manifest.contains("metadata")) ckpt.metadata = manifest["metadata"];

  const std::string blob = read_file(dir / kTensorFile);
  // Shapes come from the config; the manifest must agree with them.
  ckpt.params = init_params(ckpt.config, 0);
  const auto& tensors = manifest.at("tensors");
  if (!tensors.is_array()) throw CheckpointError("corrupt checkpoint: tensors");
  std::size_t idx = 0;
  std::size_t expected_offset = 0;
  ckpt.params.for_each([&](std::string_view name, Matrix& m) {
    if (idx >= tensors.size()) {
      throw CheckpointError("corrupt checkpoint: tensor " + std::string(name) +
                            " missing from manifest");
    }
    const auto& t = tensors[idx++];
    try {
      if (t.at("name").get<std::string>() != name) {
        throw CheckpointError("corrupt checkpoint: expected tensor " +
                              std::string(name) + ", found " +
                              t.at("name").get<std::string>());
      }
      const auto shape = t.at("shape").get<std::vector<std::int64_t>>();
      if (shape.size() != 2 || shape[0] != m.rows() || shape[1] != m.cols()) {
        throw CheckpointError("shape mismatch for tensor " + std::string(name) +
                              ": manifest " + t.at("shape").dump() + ", config [" +
                              std::to_string(m.rows()) + "," +
                              std::to_string(m.cols()) + "]");
      }
      const auto offset = t.at("offset").get<std::size_t>();
      const auto bytes = t.at("bytes").get<std::size_t>();
      if (offset != expected_offset || bytes != static_cast<std::size_t>(m.size()) * 8) {
        throw CheckpointError("corrupt checkpoint: bad offset for " + std::string(name));
      }
      if (offset + bytes > blob.size()) {
        throw CheckpointError("corrupt checkpoint: tensor data truncated at " +
                              std::string(name));
      }
      for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = get_le(blob.data() + offset + 8 * i);
      }
      expected_offset += bytes;
    } catch (const nlohmann::json::exception& e) {
      throw CheckpointError(std::string("corrupt checkpoint: ") + e.what());
    }
  });
  if (idx != tensors.size()) {
    throw CheckpointError("corrupt checkpoint: manifest lists extra tensors");
  }
  if (expected_offset != blob.size()) {
    throw CheckpointError("corrupt checkpoint: tensor data has trailing bytes");
  }
  return ckpt;
}

}  // namespace infostat
