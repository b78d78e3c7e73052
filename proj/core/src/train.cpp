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

#include "infostat/train.hpp"

#include <cmath>
#include <numeric>

#include "infostat/rng.hpp"

namespace infostat {

void TrainConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw InputError("invalid train config: " + what);
  };
  require(epochs >= 1, "epochs must be >= 1");
  require(learning_rate >= 0.0 && std::isfinite(learning_rate),
          "learning_rate must be finite and non-negative");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(beta1 >= 0.0 && beta1 < 1.0, "beta1 must be in [0, 1)");
  require(beta2 >= 0.0 && beta2 < 1.0, "beta2 must be in [0, 1)");
  require(epsilon > 0.0, "epsilon must be > 0");
  require(weight_decay >= 0.0, "weight_decay must be >= 0");
  require(grad_clip_norm > 0.0, "grad_clip_norm must be > 0");
}

TrainConfig paper_train_preset() {
  TrainConfig c;
  c.epochs = 3;
  c.learning_rate = 5e-5;
  c.batch_size = 32;
  return c;
}

AdamW::AdamW(const TrainConfig& config, const Parameters& like)
    : config_(config),
      m_(Parameters::zeros_like(like)),
      v_(Parameters::zeros_like(like)) {}

double AdamW::step(Parameters& params, Parameters& grads) {
  double sq = 0.0;
  grads.for_each([&](std::string_view, const Matrix& g) { sq += g.squaredNorm(); });
  const double norm = std::sqrt(sq);
  if (norm > config_.grad_clip_norm) {
    const double s = config_.grad_clip_norm / norm;
    grads.for_each([s](std::string_view, Matrix& g) { g *= s; });
  }

  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double lr = config_.learning_rate;

  std::vector<Matrix*> gs, ms, vs;
  grads.for_each([&](std::string_view, Matrix& g) { gs.push_back(&g); });
  m_.for_each([&](std::string_view, Matrix& m) { ms.push_back(&m); });
  v_.for_each([&](std::string_view, Matrix& v) { vs.push_back(&v); });
  std::size_t i = 0;
  params.for_each([&](std::string_view name, Matrix& p) {
    const Matrix& g = *gs[i];
    Matrix& m = *ms[i];
    Matrix& v = *vs[i];
    ++i;
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseAbs2();
    const double decay = is_decayed_tensor(name) ? config_.weight_decay : 0.0;
    p.array() -= lr * ((m.array() / c1) / ((v.array() / c2).sqrt() + config_.epsilon) +
                       decay * p.array());
  });
  return norm;
}

TrainResult train(std::span<const Example> dataset,
                  const ModelConfig& model_config,
                  const TrainConfig& train_config, const EpochCallback& on_epoch,
                  const Parameters* initial) {
  model_config.validate();
  train_config.validate();
  if (dataset.empty()) throw InputError("training set is empty");
  for (const Example& ex : dataset) {
    if (!ex.gold) throw InputError("training set contains an unlabeled example");
  }

  TrainResult result;
  result.params = initial ? *initial : init_params(model_config, train_config.seed);
  AdamW optimizer(train_config, result.params);

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 shuffle_rng(SplitMix64::mix(train_config.seed ^ 0x53485546464c45ULL));
  const std::uint64_t dropout_seed =
      SplitMix64::mix(train_config.seed ^ 0x44524f504f5554ULL);

  std::vector<Example> batch;
  batch.reserve(train_config.batch_size);
  for (int epoch = 1; epoch <= train_config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    }
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < order.size();
         begin += train_config.batch_size) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(train_config.batch_size));
      batch.clear();
      for (std::size_t j = begin; j < end; ++j) batch.push_back(dataset[order[j]]);

      LossAndGradients lg = loss_and_gradients(
          batch, result.params, model_config,
          DropoutKey{dropout_seed, optimizer.steps(), 0});
      if (!std::isfinite(lg.loss) || !lg.gradients.all_finite()) {
        throw TrainingDiverged(
            "training diverged: non-finite loss at epoch " +
                std::to_string(epoch) + ", step " +
                std::to_string(optimizer.steps() + 1),
            result.params, epoch, optimizer.steps() + 1);
      }
      Parameters before = result.params;
      optimizer.step(result.params, lg.gradients);
      if (!result.params.all_finite()) {
        throw TrainingDiverged("training diverged: non-finite parameters at epoch " +
                                   std::to_string(epoch),
                               std::move(before), epoch, optimizer.steps());
      }
      loss_sum += lg.loss;
      ++batches;
    }
    EpochStats stats{epoch, loss_sum / static_cast<double>(batches)};
    result.log.push_back(stats);
    if (on_epoch && !on_epoch(stats, result.params)) break;
  }
  result.steps = optimizer.steps();
  return result;
}

Example make_example(const Mention& mention, const Document& document,
                     const ContextMode& mode, const Vocab& vocab, int max_len) {
  const PseudoSentence ps = build_pseudo_sentence(mention, document, mode, max_len);
  return Example{encode(ps, vocab, max_len), mention.label};
}

std::vector<Example> make_examples(const Corpus& corpus, const ContextMode& mode,
                                   const Vocab& vocab, int max_len) {
  std::vector<Example> out;
  out.reserve(corpus.mention_count());
  for (const Document& doc : corpus.documents) {
    for (const Mention& m : doc.mentions) {
      out.push_back(make_example(m, doc, mode, vocab, max_len));
    }
  }
  return out;
}

Prediction predict_one(const Example& example, const std::string& mention_id,
                       const Parameters& params, const ModelConfig& config) {
  const auto& in = example.input;
  const ForwardResult fr =
      forward(in.ids, in.attention_mask, in.segment_ids, params, config, false);
  Prediction p;
  p.mention_id = mention_id;
  p.probabilities = classify(fr.hidden, in.is_index, in.attention_mask, params);
  p.label = argmax_label(p.probabilities);
  return p;
}

std::vector<Prediction> predict(std::span<const Mention> mentions,
                                const Document& document, const ContextMode& mode,
                                const Vocab& vocab, const Parameters& params,
                                const ModelConfig& config) {
  std::vector<Prediction> out;
  out.reserve(mentions.size());
  for (const Mention& m : mentions) {
    out.push_back(predict_one(make_example(m, document, mode, vocab, config.max_len),
                              m.id, params, config));
  }
  return out;
}

std::vector<Prediction> predict(const Corpus& corpus, const ContextMode& mode,
                                const Vocab& vocab, const Parameters& params,
                                const ModelConfig& config) {
  std::vector<Prediction> out;
  out.reserve(corpus.mention_count());
  for (const Document& doc : corpus.documents) {
    auto part = predict(doc.mentions, doc, mode, vocab, params, config);
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

}  // namespace infostat
