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

#include "infostat/encoder.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "infostat/errors.hpp"
#include "infostat/rng.hpp"

namespace infostat {
namespace {

constexpr double kNormEpsilon = 1e-12;
constexpr double kInvSqrt2 = 0.70710678118654752440;

// Dropout site codes; combined with the layer index into one key word.
constexpr std::uint64_t kSiteEmbedding = 0;
constexpr std::uint64_t kSiteAttention = 1;
constexpr std::uint64_t kSiteFeedForward = 2;

std::uint64_t site_key(std::uint64_t layer, std::uint64_t site) {
  return (layer << 4) | site;
}

Matrix add_bias(Matrix m, const Matrix& bias) {
  m.rowwise() += bias.row(0);
  return m;
}

Matrix layer_norm(const Matrix& x, const Matrix& scale, const Matrix& offset,
                  Matrix& xhat, Eigen::VectorXd& inv_std) {
  const Eigen::Index n = x.cols();
  xhat.resize(x.rows(), n);
  inv_std.resize(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).mean();
    const auto centered = (x.row(r).array() - mean).eval();
    const double var = centered.square().sum() / static_cast<double>(n);
    inv_std[r] = 1.0 / std::sqrt(var + kNormEpsilon);
    xhat.row(r) = centered.matrix() * inv_std[r];
  }
  Matrix y = xhat.array().rowwise() * scale.row(0).array();
  y.rowwise() += offset.row(0);
  return y;
}

Matrix layer_norm_backward(const Matrix& dy, const Matrix& xhat,
                           const Eigen::VectorXd& inv_std, const Matrix& scale,
                           Matrix& dscale, Matrix& doffset) {
  dscale += (dy.array() * xhat.array()).colwise().sum().matrix();
  doffset += dy.colwise().sum();
  const Matrix dxhat = dy.array().rowwise() * scale.row(0).array();
  const double n = static_cast<double>(dy.cols());
  Matrix dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    const double sum = dxhat.row(r).sum();
    const double dot = dxhat.row(r).dot(xhat.row(r));
    dx.row(r) = (inv_std[r] / n) *
                (n * dxhat.row(r).array() - sum - xhat.row(r).array() * dot).matrix();
  }
  return dx;
}

double gelu(double x) {
  return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2));
}

double gelu_derivative(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
  const double pdf =
      std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi * kInvSqrt2);
  return cdf + x * pdf;
}

// In-place row softmax over unmasked columns; masked columns become 0.
void masked_softmax_rows(Matrix& scores, std::span<const int> key_mask) {
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    double max = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (Eigen::Index c = 0; c < scores.cols(); ++c) {
      if (key_mask[c]) {
        max = any ? std::max(max, scores(r, c)) : scores(r, c);
        any = true;
      }
    }
    if (!any) {
      throw InputError("attention row has no unmasked key (empty sequence)");
    }
    double sum = 0.0;
    for (Eigen::Index c = 0; c < scores.cols(); ++c) {
      const double e = key_mask[c] ? std::exp(scores(r, c) - max) : 0.0;
      scores(r, c) = e;
      sum += e;
    }
    scores.row(r) /= sum;
  }
}

Matrix dropout_multipliers(Eigen::Index rows, Eigen::Index cols, double rate,
                           const DropoutKey& key, std::uint64_t site) {
  Matrix keep(rows, cols);
  const double scale = 1.0 / (1.0 - rate);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto element = static_cast<std::uint64_t>(r * cols + c);
      const double u = keyed_uniform(key.seed, key.step, key.example, site, element);
      keep(r, c) = u < rate ? 0.0 : scale;
    }
  }
  return keep;
}

void check_inputs(std::span<const int> ids, std::span<const int> mask,
                  std::span<const int> segments, const Parameters& params,
                  const ModelConfig& config) {
  if (ids.size() != mask.size() || ids.size() != segments.size()) {
    throw InputError("shape mismatch: ids, mask and segments differ in length");
  }
  if (ids.empty() || static_cast<int>(ids.size()) > config.max_len) {
    throw InputError("shape mismatch: sequence length " +
                     std::to_string(ids.size()) + " not in [1, max_len]");
  }
  if (params.layers.size() != static_cast<std::size_t>(config.n_layers) ||
      params.token_embedding.cols() != config.d_model ||
      params.token_embedding.rows() != config.vocab_size ||
      params.position_embedding.rows() != config.max_len) {
    throw InputError("shape mismatch: parameters do not match model config");
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= config.vocab_size) {
      throw InputError("token id " + std::to_string(ids[i]) + " out of range");
    }
    if (segments[i] != 0 && segments[i] != 1) {
      throw InputError("segment id must be 0 or 1");
    }
  }
}

void check_head(int is_index, std::span<const int> mask, Eigen::Index rows) {
  if (is_index < 0 || is_index >= rows ||
      static_cast<std::size_t>(is_index) >= mask.size()) {
    throw InputError("is_index " + std::to_string(is_index) + " out of range");
  }
  if (!mask[is_index]) {
    throw InputError("is_index " + std::to_string(is_index) + " points at padding");
  }
}

Eigen::RowVectorXd logits_at(const Matrix& hidden, int is_index,
                             const Parameters& params) {
  return hidden.row(is_index) * params.classifier_weight +
         params.classifier_bias.row(0);
}

Probabilities softmax8(const Eigen::RowVectorXd& logits) {
  const double max = logits.maxCoeff();
  Probabilities p{};
  double sum = 0.0;
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    p[c] = std::exp(logits[c] - max);
    sum += p[c];
  }
  for (double& v : p) v /= sum;
  return p;
}

void backward(const ForwardCache& cache, Matrix dx, const Parameters& params,
              const ModelConfig& config, Parameters& grads) {
  const int dk = config.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  for (int l = config.n_layers - 1; l >= 0; --l) {
    const LayerCache& lc = cache.layers[l];
    const LayerParams& p = params.layers[l];
    LayerParams& g = grads.layers[l];

    const Matrix dr2 = layer_norm_backward(dx, lc.ff_norm_xhat, lc.ff_norm_inv_std,
                                           p.ff_norm_scale, g.ff_norm_scale,
                                           g.ff_norm_offset);
    Matrix dff_out = dr2;
    if (lc.ff_keep.size() > 0) dff_out.array() *= lc.ff_keep.array();
    g.ff_out.noalias() += lc.ff_act.transpose() * dff_out;
    g.ff_out_bias += dff_out.colwise().sum();
    Matrix dff_pre = dff_out * p.ff_out.transpose();
    dff_pre = dff_pre.array() * lc.ff_pre.unaryExpr(&gelu_derivative).array();
    g.ff_in.noalias() += lc.attn_out.transpose() * dff_pre;
    g.ff_in_bias += dff_pre.colwise().sum();
    Matrix dh1 = dr2;
    dh1.noalias() += dff_pre * p.ff_in.transpose();

    const Matrix dr1 = layer_norm_backward(dh1, lc.attn_norm_xhat,
                                           lc.attn_norm_inv_std, p.attn_norm_scale,
                                           g.attn_norm_scale, g.attn_norm_offset);
    Matrix dattn = dr1;
    if (lc.attn_keep.size() > 0) dattn.array() *= lc.attn_keep.array();
    g.wo.noalias() += lc.context.transpose() * dattn;
    g.bo += dattn.colwise().sum();
    const Matrix dcontext = dattn * p.wo.transpose();

    const Eigen::Index rows = dx.rows();
    Matrix dq = Matrix::Zero(rows, config.d_model);
    Matrix dkey = Matrix::Zero(rows, config.d_model);
    Matrix dv = Matrix::Zero(rows, config.d_model);
    for (int h = 0; h < config.n_heads; ++h) {
      const Matrix& probs = lc.attn[h];
      const auto dch = dcontext.middleCols(h * dk, dk);
      const Matrix dprobs = dch * lc.v.middleCols(h * dk, dk).transpose();
      dv.middleCols(h * dk, dk).noalias() = probs.transpose() * dch;
      const Eigen::VectorXd row_dot =
          (dprobs.array() * probs.array()).rowwise().sum();
      const Matrix dscores =
          (probs.array() * (dprobs.array().colwise() - row_dot.array())) * scale;
      dq.middleCols(h * dk, dk).noalias() =
          dscores * lc.k.middleCols(h * dk, dk);
      dkey.middleCols(h * dk, dk).noalias() =
          dscores.transpose() * lc.q.middleCols(h * dk, dk);
    }
    g.wq.noalias() += lc.input.transpose() * dq;
    g.bq += dq.colwise().sum();
    g.wk.noalias() += lc.input.transpose() * dkey;
    g.bk += dkey.colwise().sum();
    g.wv.noalias() += lc.input.transpose() * dv;
    g.bv += dv.colwise().sum();

    Matrix dh = dr1;
    dh.noalias() += dq * p.wq.transpose();
    dh.noalias() += dkey * p.wk.transpose();
    dh.noalias() += dv * p.wv.transpose();
    dx = std::move(dh);
  }

  if (cache.embed_keep.size() > 0) dx.array() *= cache.embed_keep.array();
  const Matrix dsum =
      layer_norm_backward(dx, cache.embed_xhat, cache.embed_inv_std,
                          params.embed_norm_scale, grads.embed_norm_scale,
                          grads.embed_norm_offset);
  for (Eigen::Index t = 0; t < dsum.rows(); ++t) {
    grads.token_embedding.row(cache.ids[t]) += dsum.row(t);
    grads.position_embedding.row(t) += dsum.row(t);
    grads.segment_embedding.row(cache.segments[t]) += dsum.row(t);
  }
}

std::size_t effective_length(std::span<const int> mask) {
  std::size_t len = mask.size();
  while (len > 0 && mask[len - 1] == 0) --len;
  return len;
}

// Forward (and optionally backward) for one example; gradients are scaled by
// `weight` and accumulated into `grads`.
double example_loss(const Example& ex, std::size_t index,
                    const Parameters& params, const ModelConfig& config,
                    const std::optional<DropoutKey>& dropout, double weight,
                    Parameters* grads) {
  if (!ex.gold) throw InputError("unlabeled example in batch");
  const auto& in = ex.input;
  const std::size_t len = effective_length(in.attention_mask);
  const std::span<const int> ids(in.ids.data(), len);
  const std::span<const int> mask(in.attention_mask.data(), len);
  const std::span<const int> segments(in.segment_ids.data(), len);

  DropoutKey key;
  if (dropout) key = {dropout->seed, dropout->step, index};
  ForwardResult fr =
      forward(ids, mask, segments, params, config, dropout.has_value(), key);
  check_head(in.is_index, mask, fr.hidden.rows());

  const Eigen::RowVectorXd logits = logits_at(fr.hidden, in.is_index, params);
  const double max = logits.maxCoeff();
  double sum = 0.0;
  for (Eigen::Index c = 0; c < logits.size(); ++c) sum += std::exp(logits[c] - max);
  const double log_sum = max + std::log(sum);
  const std::size_t gold = label_index(*ex.gold);
  const double loss = log_sum - logits[gold];

  if (grads != nullptr) {
    Eigen::RowVectorXd dz(logits.size());
    for (Eigen::Index c = 0; c < logits.size(); ++c) {
      dz[c] = std::exp(logits[c] - log_sum);
    }
    dz[gold] -= 1.0;
    dz *= weight;
    grads->classifier_weight.noalias() += fr.hidden.row(in.is_index).transpose() * dz;
    grads->classifier_bias += dz;
    Matrix dhidden = Matrix::Zero(fr.hidden.rows(), fr.hidden.cols());
    dhidden.row(in.is_index) = dz * params.classifier_weight.transpose();
    backward(fr.cache, std::move(dhidden), params, config, *grads);
  }
  return loss;
}

}  // namespace

Matrix attention_weights(const Matrix& queries, const Matrix& keys,
                         std::span<const int> key_mask) {
  if (queries.cols() != keys.cols() ||
      static_cast<std::size_t>(keys.rows()) != key_mask.size()) {
    throw InputError("shape mismatch in attention_weights");
  }
  Matrix scores = queries * keys.transpose();
  scores *= 1.0 / std::sqrt(static_cast<double>(queries.cols()));
  masked_softmax_rows(scores, key_mask);
  return scores;
}

ForwardResult forward(std::span<const int> ids, std::span<const int> mask,
                      std::span<const int> segments, const Parameters& params,
                      const ModelConfig& config, bool train_mode,
                      const DropoutKey& dropout) {
  check_inputs(ids, mask, segments, params, config);
  const auto len = static_cast<Eigen::Index>(ids.size());
  const int d = config.d_model;
  const int dk = config.head_dim();
  const bool use_dropout = train_mode && config.dropout_rate > 0.0;

  ForwardResult out;
  ForwardCache& cache = out.cache;
  cache.ids.assign(ids.begin(), ids.end());
  cache.segments.assign(segments.begin(), segments.end());
  cache.mask.assign(mask.begin(), mask.end());

  Matrix sum(len, d);
  for (Eigen::Index t = 0; t < len; ++t) {
    sum.row(t) = params.token_embedding.row(ids[t]) +
                 params.position_embedding.row(t) +
                 params.segment_embedding.row(segments[t]);
  }
  Matrix x = layer_norm(sum, params.embed_norm_scale, params.embed_norm_offset,
                        cache.embed_xhat, cache.embed_inv_std);
  if (use_dropout) {
    cache.embed_keep = dropout_multipliers(len, d, config.dropout_rate, dropout,
                                           site_key(0, kSiteEmbedding));
    x.array() *= cache.embed_keep.array();
  }

  cache.layers.resize(config.n_layers);
  for (int l = 0; l < config.n_layers; ++l) {
    const LayerParams& p = params.layers[l];
    LayerCache& lc = cache.layers[l];
    lc.input = std::move(x);
    lc.q = add_bias(lc.input * p.wq, p.bq);
    lc.k = add_bias(lc.input * p.wk, p.bk);
    lc.v = add_bias(lc.input * p.wv, p.bv);
    lc.context.resize(len, d);
    lc.attn.resize(config.n_heads);
    for (int h = 0; h < config.n_heads; ++h) {
      lc.attn[h] = attention_weights(lc.q.middleCols(h * dk, dk),
                                     lc.k.middleCols(h * dk, dk), mask);
      lc.context.middleCols(h * dk, dk).noalias() =
          lc.attn[h] * lc.v.middleCols(h * dk, dk);
    }
    Matrix attn = add_bias(lc.context * p.wo, p.bo);
    if (use_dropout) {
      lc.attn_keep = dropout_multipliers(len, d, config.dropout_rate, dropout,
                                         site_key(l + 1, kSiteAttention));
      attn.array() *= lc.attn_keep.array();
    }
    lc.attn_out = layer_norm(lc.input + attn, p.attn_norm_scale,
                             p.attn_norm_offset, lc.attn_norm_xhat,
                             lc.attn_norm_inv_std);

    lc.ff_pre = add_bias(lc.attn_out * p.ff_in, p.ff_in_bias);
    lc.ff_act = lc.ff_pre.unaryExpr(&gelu);
    Matrix ff = add_bias(lc.ff_act * p.ff_out, p.ff_out_bias);
    if (use_dropout) {
      lc.ff_keep = dropout_multipliers(len, d, config.dropout_rate, dropout,
                                       site_key(l + 1, kSiteFeedForward));
      ff.array() *= lc.ff_keep.array();
    }
    x = layer_norm(lc.attn_out + ff, p.ff_norm_scale, p.ff_norm_offset,
                   lc.ff_norm_xhat, lc.ff_norm_inv_std);
  }
  out.hidden = std::move(x);
  return out;
}

Probabilities classify(const Matrix& hidden, int is_index,
                       std::span<const int> mask, const Parameters& params) {
  check_head(is_index, mask, hidden.rows());
  return softmax8(logits_at(hidden, is_index, params));
}

ISLabel argmax_label(const Probabilities& probs) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumLabels; ++c) {
    if (probs[c] > probs[best]) best = c;
  }
  return label_from_index(best);
}

LossAndGradients loss_and_gradients(std::span<const Example> batch,
                                    const Parameters& params,
                                    const ModelConfig& config,
                                    std::optional<DropoutKey> dropout) {
  if (batch.empty()) throw InputError("empty batch");
  LossAndGradients out;
  out.gradients = Parameters::zeros_like(params);
  const double weight = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    total += example_loss(batch[i], i, params, config, dropout, weight,
                          &out.gradients);
  }
  out.loss = total * weight;
  return out;
}

double batch_loss(std::span<const Example> batch, const Parameters& params,
                  const ModelConfig& config, std::optional<DropoutKey> dropout) {
  if (batch.empty()) throw InputError("empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    total += example_loss(batch[i], i, params, config, dropout, 0.0, nullptr);
  }
  return total / static_cast<double>(batch.size());
}

GradCheckReport gradient_check(std::span<const Example> batch,
                               const Parameters& params,
                               const ModelConfig& config, double epsilon,
                               double floor) {
  const LossAndGradients analytic = loss_and_gradients(batch, params, config);
  std::vector<const Matrix*> grads;
  analytic.gradients.for_each(
      [&](std::string_view, const Matrix& m) { grads.push_back(&m); });

  GradCheckReport report;
  Parameters work = params;
  std::size_t tensor = 0;
  work.for_each([&](std::string_view name, Matrix& m) {
    const Matrix& g = *grads[tensor++];
    TensorGradCheck tc;
    tc.name = std::string(name);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double saved = m.data()[i];
      m.data()[i] = saved + epsilon;
      const double plus = batch_loss(batch, work, config);
      m.data()[i] = saved - epsilon;
      const double minus = batch_loss(batch, work, config);
      m.data()[i] = saved;
      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double a = g.data()[i];
      const double abs_err = std::abs(a - numeric);
      const double rel =
          abs_err / std::max({std::abs(a), std::abs(numeric), floor});
      tc.max_abs_error = std::max(tc.max_abs_error, abs_err);
      tc.max_rel_error = std::max(tc.max_rel_error, rel);
      ++tc.checked;
    }
    report.max_rel_error = std::max(report.max_rel_error, tc.max_rel_error);
    report.tensors.push_back(std::move(tc));
  });
  return report;
}

}  // namespace infostat
