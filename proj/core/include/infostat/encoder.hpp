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

#ifndef INFOSTAT_ENCODER_HPP_
#define INFOSTAT_ENCODER_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "infostat/context.hpp"
#include "infostat/labels.hpp"
#include "infostat/model.hpp"

namespace infostat {

using Probabilities = std::array<double, kNumLabels>;

// Scaled dot-product attention weights softmax(Q K^T / sqrt(d_k)) with masked
// keys (key_mask[j] == 0) forced to exactly zero weight. Throws InputError when
// every key is masked.
Matrix attention_weights(const Matrix& queries, const Matrix& keys,
                         std::span<const int> key_mask);

// Identifies one dropout draw site family: a mask element is a pure function
// of (seed, step, example, site, layer, element).
struct DropoutKey {
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
  std::uint64_t example = 0;
};

struct LayerCache {
  Matrix input;
  Matrix q, k, v;
  std::vector<Matrix> attn;  // per head, L x L
  Matrix context;            // concatenated heads
  Matrix attn_keep;          // dropout multipliers (empty when inactive)
  Matrix attn_norm_xhat;
  Eigen::VectorXd attn_norm_inv_std;
  Matrix attn_out;  // after first normalization
  Matrix ff_pre;    // before GELU
  Matrix ff_act;
  Matrix ff_keep;
  Matrix ff_norm_xhat;
  Eigen::VectorXd ff_norm_inv_std;
};

struct ForwardCache {
  std::vector<int> ids;
  std::vector<int> segments;
  std::vector<int> mask;
  Matrix embed_xhat;
  Eigen::VectorXd embed_inv_std;
  Matrix embed_keep;
  std::vector<LayerCache> layers;
};

struct ForwardResult {
  Matrix hidden;  // rows = sequence length, cols = d_model
  ForwardCache cache;
};

// Embedding sum -> normalization -> n_layers post-norm encoder blocks.
// Dropout only runs when train_mode is set, keyed by `dropout`.
ForwardResult forward(std::span<const int> ids, std::span<const int> mask,
                      std::span<const int> segments, const Parameters& params,
                      const ModelConfig& config, bool train_mode = false,
                      const DropoutKey& dropout = {});

// softmax(W^T h[is_index] + b). Throws InputError when is_index is padding.
Probabilities classify(const Matrix& hidden, int is_index,
                       std::span<const int> mask, const Parameters& params);

// Lowest index wins ties.
ISLabel argmax_label(const Probabilities& probs);

struct Example {
  EncodedInput input;
  std::optional<ISLabel> gold;
};

struct LossAndGradients {
  double loss = 0.0;
  Parameters gradients;
};

// Mean cross-entropy over the batch and its exact gradient. Sequences are
// trimmed to their last unmasked position, which leaves every unmasked
// activation unchanged. `dropout` = nullopt runs deterministic inference-mode
// activations; otherwise example i uses key {seed, step, i}.
LossAndGradients loss_and_gradients(std::span<const Example> batch,
                                    const Parameters& params,
                                    const ModelConfig& config,
                                    std::optional<DropoutKey> dropout = {});

// Loss only (same trimming, no gradients).
double batch_loss(std::span<const Example> batch, const Parameters& params,
                  const ModelConfig& config,
                  std::optional<DropoutKey> dropout = {});

struct TensorGradCheck {
  std::string name;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t checked = 0;
};

struct GradCheckReport {
  std::vector<TensorGradCheck> tensors;
  double max_rel_error = 0.0;
};

// Central finite differences on every scalar, dropout off.
// rel = |analytic - numeric| / max(|analytic|, |numeric|, floor). The floor
// keeps mathematically-zero gradients (e.g. key biases, which softmax is
// invariant to) from dividing round-off by round-off.
GradCheckReport gradient_check(std::span<const Example> batch,
                               const Parameters& params,
                               const ModelConfig& config, double epsilon = 1e-5,
                               double floor = 1e-6);

}  // namespace infostat

#endif  // INFOSTAT_ENCODER_HPP_
