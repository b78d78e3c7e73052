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

#ifndef INFOSTAT_MODEL_HPP_
#define INFOSTAT_MODEL_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "infostat/labels.hpp"

namespace infostat {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

struct ModelConfig {
  int n_layers = 2;
  int d_model = 64;
  int n_heads = 4;
  int d_ff = 256;
  int max_len = 64;
  int vocab_size = 8;
  int n_classes = static_cast<int>(kNumLabels);
  double dropout_rate = 0.1;

  int head_dim() const { return d_model / n_heads; }
  // Throws InputError naming the first violated constraint.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

// 2 layers, 64 hidden, 4 heads, 256 feed-forward, 64 tokens, dropout 0.1.
ModelConfig desk_preset();
// 12 layers, 768 hidden, 12 heads, 3072 feed-forward, 128 tokens.
ModelConfig paper_preset();

// One encoder block. Vectors are stored as 1 x n matrices so every tensor
// can be visited uniformly.
struct LayerParams {
  Matrix wq, bq, wk, bk, wv, bv, wo, bo;
  Matrix attn_norm_scale, attn_norm_offset;
  Matrix ff_in, ff_in_bias, ff_out, ff_out_bias;
  Matrix ff_norm_scale, ff_norm_offset;
};

struct Parameters {
  Matrix token_embedding;     // vocab_size x d_model
  Matrix position_embedding;  // max_len x d_model
  Matrix segment_embedding;   // 2 x d_model
  Matrix embed_norm_scale, embed_norm_offset;
  std::vector<LayerParams> layers;
  Matrix classifier_weight;  // d_model x n_classes
  Matrix classifier_bias;    // 1 x n_classes

  // Same shapes, all zeros.
  static Parameters zeros_like(const Parameters& other);

  // Visits every tensor in canonical order with its stable name, e.g.
  // "layer1.attn.wq". Checkpoints and the optimizer rely on this order.
  void for_each(const std::function<void(std::string_view, Matrix&)>& fn);
  void for_each(
      const std::function<void(std::string_view, const Matrix&)>& fn) const;

  std::size_t scalar_count() const;
  bool all_finite() const;
  bool operator==(const Parameters& other) const;
};

// Tensor kinds that receive weight decay: projection matrices and embeddings.
bool is_decayed_tensor(std::string_view name);

// Weights ~ N(0, 0.02) truncated at two standard deviations, normalization
// scales 1, offsets and biases 0. Pure function of (config, seed).
Parameters init_params(const ModelConfig& config, std::uint64_t seed);

}  // namespace infostat

#endif  // INFOSTAT_MODEL_HPP_
