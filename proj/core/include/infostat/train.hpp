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

#ifndef INFOSTAT_TRAIN_HPP_
#define INFOSTAT_TRAIN_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infostat/context.hpp"
#include "infostat/encoder.hpp"
#include "infostat/errors.hpp"
#include "infostat/model.hpp"

namespace infostat {

struct TrainConfig {
  int epochs = 20;
  double learning_rate = 1e-3;
  int batch_size = 16;
  std::uint64_t seed = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
  double grad_clip_norm = 1.0;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

// 3 epochs at 5e-5, batch 32.
TrainConfig paper_train_preset();

// Adam with decoupled weight decay on matrices/embeddings only.
class AdamW {
 public:
  AdamW(const TrainConfig& config, const Parameters& like);
  // Clips `grads` to the configured global norm, then updates `params`.
  // Returns the pre-clip gradient norm.
  double step(Parameters& params, Parameters& grads);
  std::uint64_t steps() const { return t_; }

 private:
  TrainConfig config_;
  Parameters m_, v_;
  std::uint64_t t_ = 0;
};

struct EpochStats {
  int epoch = 0;  // 1-based
  double mean_loss = 0.0;
};

struct TrainResult {
  Parameters params;
  std::vector<EpochStats> log;
  std::uint64_t steps = 0;
};

// Raised on a non-finite loss. Carries the parameters from before the
// failing step.
class TrainingDiverged : public NumericError {
 public:
  TrainingDiverged(const std::string& what, Parameters last_finite,
                   int epoch, std::uint64_t step)
      : NumericError(what),
        last_finite_(std::move(last_finite)),
        epoch_(epoch),
        step_(step) {}

  const Parameters& last_finite() const { return last_finite_; }
  int epoch() const { return epoch_; }
  std::uint64_t step() const { return step_; }

 private:
  Parameters last_finite_;
  int epoch_;
  std::uint64_t step_;
};

// Called after each epoch; return false to stop early.
using EpochCallback =
    std::function<bool(const EpochStats&, const Parameters&)>;

// epochs x ceil(N / batch_size) AdamW steps over a seeded shuffle. Parameters
// start from init_params(model_config, train_config.seed) unless `initial`
// is given.
TrainResult train(std::span<const Example> dataset,
                  const ModelConfig& model_config,
                  const TrainConfig& train_config,
                  const EpochCallback& on_epoch = {},
                  const Parameters* initial = nullptr);

struct Prediction {
  std::string mention_id;
  Probabilities probabilities{};
  ISLabel label = ISLabel::kOld;
};

// Encodes one mention exactly as predict() does.
Example make_example(const Mention& mention, const Document& document,
                     const ContextMode& mode, const Vocab& vocab,
                     int max_len);

std::vector<Example> make_examples(const Corpus& corpus,
                                   const ContextMode& mode, const Vocab& vocab,
                                   int max_len);

Prediction predict_one(const Example& example, const std::string& mention_id,
                       const Parameters& params, const ModelConfig& config);

std::vector<Prediction> predict(std::span<const Mention> mentions,
                                const Document& document,
                                const ContextMode& mode, const Vocab& vocab,
                                const Parameters& params,
                                const ModelConfig& config);

// Every mention of every document, in corpus order.
std::vector<Prediction> predict(const Corpus& corpus, const ContextMode& mode,
                                const Vocab& vocab, const Parameters& params,
                                const ModelConfig& config);

}  // namespace infostat

#endif  // INFOSTAT_TRAIN_HPP_
