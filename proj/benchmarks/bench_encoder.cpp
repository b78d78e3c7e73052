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

#include <vector>

#include <benchmark/benchmark.h>

#include "infostat/context.hpp"
#include "infostat/corpus.hpp"
#include "infostat/encoder.hpp"
#include "infostat/train.hpp"

namespace infostat {
namespace {

struct Fixture {
  ModelConfig config = desk_preset();
  Corpus corpus = generate_synthetic({.seed = 3, .n_docs = 4, .sentences_per_doc = 8,
                                      .mentions_per_sentence = 4});
  ContextMode mode{ContextKind::kLocalContextOverlap, 0};
  Vocab vocab;
  std::vector<Example> examples;
  Parameters params;

  explicit Fixture(int window) {
    mode.prev_sentence_window = window;
    vocab = build_vocab(corpus, mode, config.max_len, 1);
    config.vocab_size = vocab.size();
    examples = make_examples(corpus, mode, vocab, config.max_len);
    params = init_params(config, 1);
  }
};

void BM_Forward(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  const Example& ex = f.examples.back();
  for (auto _ : state) {
    auto r = forward(ex.input.ids, ex.input.attention_mask, ex.input.segment_ids, f.params,
                     f.config);
    benchmark::DoNotOptimize(r.hidden.data());
  }
}
BENCHMARK(BM_Forward)->Arg(0)->Arg(3);

void BM_LossAndGradients(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  const std::span<const Example> batch(f.examples.data(), 16);
  for (auto _ : state) {
    auto r = loss_and_gradients(batch, f.params, f.config, DropoutKey{1, 0, 0});
    benchmark::DoNotOptimize(r.loss);
  }
  state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_LossAndGradients)->Arg(0)->Arg(3);

void BM_BuildPseudoSentence(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  const Document& doc = f.corpus.documents[0];
  for (auto _ : state) {
    for (const Mention& m : doc.mentions) {
      auto ps = build_pseudo_sentence(m, doc, f.mode, f.config.max_len);
      benchmark::DoNotOptimize(ps.surface_tokens.data());
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(doc.mentions.size()));
}
BENCHMARK(BM_BuildPseudoSentence)->Arg(0)->Arg(3);

}  // namespace
}  // namespace infostat

BENCHMARK_MAIN();
