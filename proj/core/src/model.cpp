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

#include "infostat/model.hpp"

#include <cstring>
#include <string>

#include "infostat/errors.hpp"
#include "infostat/rng.hpp"

namespace infostat {

void ModelConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw InputError("invalid model config: " + what);
  };
  require(n_layers >= 0, "n_layers must be >= 0");
  require(d_model >= 1, "d_model must be >= 1");
  require(n_heads >= 1, "n_heads must be >= 1");
  require(d_model % n_heads == 0, "d_model must be divisible by n_heads");
  require(d_ff >= 1, "d_ff must be >= 1");
  require(max_len >= 2, "max_len must be >= 2");
  require(vocab_size >= 8, "vocab_size must cover the reserved tokens");
  require(n_classes == static_cast<int>(kNumLabels), "n_classes must be 8");
  require(dropout_rate >= 0.0 && dropout_rate < 1.0,
          "dropout_rate must be in [0, 1)");
}

ModelConfig desk_preset() { return ModelConfig{}; }

ModelConfig paper_preset() {
  ModelConfig c;
  c.n_layers = 12;
  c.d_model = 768;
  c.n_heads = 12;
  c.d_ff = 3072;
  c.max_len = 128;
  c.dropout_rate = 0.1;
  return c;
}

namespace {

template <typename P, typename Fn>
void visit(P& p, Fn&& fn) {
  fn("embed.token", p.token_embedding);
  fn("embed.position", p.position_embedding);
  fn("embed.segment", p.segment_embedding);
  fn("embed.norm.scale", p.embed_norm_scale);
  fn("embed.norm.offset", p.embed_norm_offset);
  std::string prefix;
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    auto& layer = p.layers[l];
    prefix = "layer" + std::to_string(l) + ".";
    fn(prefix + "attn.wq", layer.wq);
    fn(prefix + "attn.bq", layer.bq);
    fn(prefix + "attn.wk", layer.wk);
    fn(prefix + "attn.bk", layer.bk);
    fn(prefix + "attn.wv", layer.wv);
    fn(prefix + "attn.bv", layer.bv);
    fn(prefix + "attn.wo", layer.wo);
    fn(prefix + "attn.bo", layer.bo);
    fn(prefix + "attn_norm.scale", layer.attn_norm_scale);
    fn(prefix + "attn_norm.offset", layer.attn_norm_offset);
    fn(prefix + "ff.w_in", layer.ff_in);
    fn(prefix + "ff.b_in", layer.ff_in_bias);
    fn(prefix + "ff.w_out", layer.ff_out);
    fn(prefix + "ff.b_out", layer.ff_out_bias);
    fn(prefix + "ff_norm.scale", layer.ff_norm_scale);
    fn(prefix + "ff_norm.offset", layer.ff_norm_offset);
  }
  fn("classifier.weight", p.classifier_weight);
  fn("classifier.bias", p.classifier_bias);
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

void Parameters::for_each(
    const std::function<void(std::string_view, Matrix&)>& fn) {
  visit(*this, [&](const std::string& name, Matrix& m) { fn(name, m); });
}

void Parameters::for_each(
    const std::function<void(std::string_view, const Matrix&)>& fn) const {
  visit(*this, [&](const std::string& name, const Matrix& m) { fn(name, m); });
}

Parameters Parameters::zeros_like(const Parameters& other) {
  Parameters out = other;
  out.for_each([](std::string_view, Matrix& m) { m.setZero(); });
  return out;
}

std::size_t Parameters::scalar_count() const {
  std::size_t n = 0;
  for_each([&](std::string_view, const Matrix& m) { n += m.size(); });
  return n;
}

bool Parameters::all_finite() const {
  bool ok = true;
  for_each([&](std::string_view, const Matrix& m) { ok = ok && m.allFinite(); });
  return ok;
}

bool Parameters::operator==(const Parameters& other) const {
  std::vector<const Matrix*> mine, theirs;
  for_each([&](std::string_view, const Matrix& m) { mine.push_back(&m); });
  other.for_each([&](std::string_view, const Matrix& m) { theirs.push_back(&m); });
  if (mine.size() != theirs.size()) return false;
  for (std::size_t i = 0; i < mine.size(); ++i) {
    const Matrix& a = *mine[i];
    const Matrix& b = *theirs[i];
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    // Bitwise: distinguishes -0.0 and compares NaN payloads.
    if (a.size() > 0 &&
        std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) != 0) {
      return false;
    }
  }
  return true;
}

bool is_decayed_tensor(std::string_view name) {
  if (name.starts_with("embed.") && !name.starts_with("embed.norm")) return true;
  return ends_with(name, ".wq") || ends_with(name, ".wk") ||
         ends_with(name, ".wv") || ends_with(name, ".wo") ||
         ends_with(name, ".w_in") || ends_with(name, ".w_out") ||
         name == "classifier.weight";
}

Parameters init_params(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  const int d = config.d_model;
  Parameters p;
  p.token_embedding = Matrix(config.vocab_size, d);
  p.position_embedding = Matrix(config.max_len, d);
  p.segment_embedding = Matrix(2, d);
  p.embed_norm_scale = Matrix::Ones(1, d);
  p.embed_norm_offset = Matrix::Zero(1, d);
  p.layers.resize(config.n_layers);
  for (auto& layer : p.layers) {
    layer.wq = Matrix(d, d);
    layer.bq = Matrix::Zero(1, d);
    layer.wk = Matrix(d, d);
    layer.bk = Matrix::Zero(1, d);
    layer.wv = Matrix(d, d);
    layer.bv = Matrix::Zero(1, d);
    layer.wo = Matrix(d, d);
    layer.bo = Matrix::Zero(1, d);
    layer.attn_norm_scale = Matrix::Ones(1, d);
    layer.attn_norm_offset = Matrix::Zero(1, d);
    layer.ff_in = Matrix(d, config.d_ff);
    layer.ff_in_bias = Matrix::Zero(1, config.d_ff);
    layer.ff_out = Matrix(config.d_ff, d);
    layer.ff_out_bias = Matrix::Zero(1, d);
    layer.ff_norm_scale = Matrix::Ones(1, d);
    layer.ff_norm_offset = Matrix::Zero(1, d);
  }
  p.classifier_weight = Matrix(d, config.n_classes);
  p.classifier_bias = Matrix::Zero(1, config.n_classes);

  // Each tensor gets its own stream so that adding a layer leaves the
  // others' initial values unchanged.
  p.for_each([seed](std::string_view name, Matrix& m) {
    if (!is_decayed_tensor(name)) return;
    SplitMix64 rng(SplitMix64::mix(seed ^ fnv1a(name)));
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      m.data()[i] = rng.truncated_normal(0.02);
    }
  });
  return p;
}

}  // namespace infostat
