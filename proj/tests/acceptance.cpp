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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "infostat/context.hpp"
#include "infostat/corpus.hpp"
#include "infostat/crossval.hpp"
#include "infostat/encoder.hpp"
#include "infostat/eval.hpp"
#include "infostat/train.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace infostat {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool bit_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

// 1. Analytic gradients against central differences.
Outcome gradient_fidelity() {
  const ModelConfig c = testing::small_config(2, 16, 2, 20, 8);
  SplitMix64 rng(101);
  const auto batch = testing::random_batch(rng, c, 3);
  double worst = 0.0;
  std::string worst_tensor;
  std::size_t tensors = 0;
  for (const Parameters& p : {init_params(c, 1), testing::perturbed_params(c, 2, 0.5)}) {
    const GradCheckReport r = gradient_check(batch, p, c, 1e-5);
    for (const auto& t : r.tensors) {
      ++tensors;
      if (t.max_rel_error >= worst) {
        worst = t.max_rel_error;
        worst_tensor = t.name;
      }
    }
  }
  return {worst < 1e-4, fmt("max relative error %.3e (%s) over %zu tensor checks", worst,
                            worst_tensor.c_str(), tensors)};
}

// 2. Attention rows are distributions over the unmasked keys.
Outcome attention_normalization() {
  double worst = 0.0;
  std::size_t masked_nonzero = 0;
  std::size_t rows = 0;
  const auto check = [&](const Matrix& w, std::span<const int> mask) {
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      double sum = 0.0;
      for (Eigen::Index k = 0; k < w.cols(); ++k) {
        if (mask[k]) {
          sum += w(r, k);
        } else if (w(r, k) != 0.0) {
          ++masked_nonzero;
        }
      }
      worst = std::max(worst, std::abs(sum - 1.0));
      ++rows;
    }
  };
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SplitMix64 rng(seed);
    const int nq = 1 + static_cast<int>(rng.below(32));
    const int nk = 1 + static_cast<int>(rng.below(32));
    const int d = 1 + static_cast<int>(rng.below(64));
    const double scale = std::pow(10.0, 2.0 * rng.uniform() - 1.0);
    Matrix q(nq, d);
    Matrix k(nk, d);
    for (Eigen::Index i = 0; i < q.size(); ++i) q.data()[i] = scale * rng.normal();
    for (Eigen::Index i = 0; i < k.size(); ++i) k.data()[i] = scale * rng.normal();
    std::vector<int> mask(nk);
    for (int& m : mask) m = rng.uniform() < 0.7;
    mask[rng.below(nk)] = 1;
    check(attention_weights(q, k, mask), mask);

    // The same property inside a full forward pass with padding.
    const int heads = 1 << rng.below(3);
    ModelConfig c = testing::small_config(1 + static_cast<int>(rng.below(2)), 8 * heads, heads,
                                          30, 2 + static_cast<int>(rng.below(20)));
    const Example ex = testing::random_example(rng, c);
    const Parameters p = testing::perturbed_params(c, seed, 1.0);
    const auto fr = forward(ex.input.ids, ex.input.attention_mask, ex.input.segment_ids, p, c);
    for (const auto& layer : fr.cache.layers) {
      for (const Matrix& w : layer.attn) check(w, ex.input.attention_mask);
    }
  }
  return {worst <= 1e-6 && masked_nonzero == 0,
          fmt("%zu rows, max |sum-1| %.2e, %zu non-zero masked weights", rows, worst,
              masked_nonzero)};
}

// 3. Token ids under the padding mask have no effect.
Outcome padding_inertness() {
  std::size_t failures = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    SplitMix64 rng(1000 + trial);
    ModelConfig c = testing::small_config(2, 16, 4, 40, 12);
    c.dropout_rate = 0.2;
    Example ex = testing::random_example(rng, c);
    if (ex.input.is_index == c.max_len - 1) {  // ensure some padding
      ex.input.attention_mask.back() = 0;
      ex.input.ids.back() = 0;
      ex.input.is_index -= 1;
    }
    Example mutated = ex;
    for (int t = 0; t < c.max_len; ++t) {
      if (!mutated.input.attention_mask[t]) {
        mutated.input.ids[t] = 1 + static_cast<int>(rng.below(c.vocab_size - 1));
      }
    }
    const Parameters p = testing::perturbed_params(c, trial, 0.5);
    const DropoutKey key{trial, 3, 0};
    for (bool train_mode : {false, true}) {
      const auto a = forward(ex.input.ids, ex.input.attention_mask, ex.input.segment_ids, p, c,
                             train_mode, key);
      const auto b = forward(mutated.input.ids, mutated.input.attention_mask,
                             mutated.input.segment_ids, p, c, train_mode, key);
      const int real = ex.input.is_index + 1;
      if (!bit_equal(Matrix(a.hidden.topRows(real)), Matrix(b.hidden.topRows(real)))) ++failures;
      if (!train_mode) {
        const auto pa = classify(a.hidden, ex.input.is_index, ex.input.attention_mask, p);
        const auto pb = classify(b.hidden, ex.input.is_index, ex.input.attention_mask, p);
        if (std::memcmp(pa.data(), pb.data(), sizeof pa) != 0) ++failures;
        if (argmax_label(pa) != argmax_label(pb)) ++failures;
      }
    }
    const std::vector<Example> ba = {ex};
    const std::vector<Example> bb = {mutated};
    if (!bit_equal(batch_loss(ba, p, c), batch_loss(bb, p, c))) ++failures;
    if (!bit_equal(batch_loss(ba, p, c, key), batch_loss(bb, p, c, key))) ++failures;
    const auto ga = loss_and_gradients(ba, p, c, key);
    const auto gb = loss_and_gradients(bb, p, c, key);
    if (!bit_equal(ga.loss, gb.loss) || !(ga.gradients == gb.gradients)) ++failures;
  }
  return {failures == 0, fmt("100 trials, %zu mismatches", failures)};
}

double training_accuracy(const std::vector<Example>& data, const Parameters& p,
                         const ModelConfig& c) {
  std::size_t correct = 0;
  for (const Example& ex : data) correct += predict_one(ex, "", p, c).label == *ex.gold;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

// 4. The desk model can memorize a small dataset.
Outcome overfit_capacity() {
  const Corpus corpus = generate_synthetic(
      {.seed = 4, .n_docs = 4, .sentences_per_doc = 4, .mentions_per_sentence = 4});
  const ContextMode mode{ContextKind::kLocalContextOverlap, 0};
  ModelConfig c = desk_preset();
  const Vocab vocab = build_vocab(corpus, mode, c.max_len, 1);
  c.vocab_size = vocab.size();
  const auto data = make_examples(corpus, mode, vocab, c.max_len);
  TrainConfig t;
  t.epochs = 300;
  t.seed = 4;
  double acc = 0.0;
  int epochs = 0;
  train(data, c, t, [&](const EpochStats& s, const Parameters& p) {
    epochs = s.epoch;
    acc = training_accuracy(data, p, c);
    return acc < 1.0;
  });
  return {data.size() == 64 && acc == 1.0,
          fmt("%zu mentions, training accuracy %.4f after %d epochs", data.size(), acc,
              epochs)};
}

// 5. Context ablation on a corpus where old/new is decided by repetition.
Outcome context_ablation() {
  const Corpus corpus = generate_synthetic(
      {.seed = 1, .n_docs = 40, .sentences_per_doc = 10, .mentions_per_sentence = 5});
  double acc[3] = {};
  double old_new[3] = {};
  for (int kind = 0; kind < 3; ++kind) {
    CrossValConfig cv;
    cv.mode = {static_cast<ContextKind>(kind), 0};
    cv.model.n_layers = 1;
    cv.model.d_model = 32;
    cv.model.n_heads = 4;
    cv.model.d_ff = 64;
    cv.model.max_len = 40;
    cv.model.dropout_rate = 0.1;
    cv.train.epochs = 8;
    cv.train.learning_rate = 2e-3;
    cv.train.batch_size = 16;
    cv.k = 10;
    cv.seed = 1;
    const CrossValResult r = run_cross_validation(corpus, cv);
    acc[kind] = r.pooled.accuracy;
    std::size_t n = 0;
    std::size_t correct = 0;
    for (const auto& p : r.pooled_predictions()) {
      if (*p.gold == ISLabel::kOld || *p.gold == ISLabel::kNew) {
        ++n;
        correct += p.pred == *p.gold;
      }
    }
    old_new[kind] = static_cast<double>(correct) / static_cast<double>(n);
  }
  const bool pass = corpus.mention_count() >= 2000 && acc[2] >= acc[1] && acc[1] >= acc[0] &&
                    old_new[2] >= 0.95 && old_new[0] <= 0.70;
  return {pass, fmt("%zu mentions; accuracy mention-only %.4f, context1 %.4f, context2 %.4f; "
                    "old/new mention-only %.4f, context2 %.4f",
                    corpus.mention_count(), acc[0], acc[1], acc[2], old_new[0], old_new[2])};
}

// 6. Pseudo-sentence layout over every mention of several corpora.
std::vector<std::string> folded(const std::vector<Token>& tokens, int begin, int end) {
  std::vector<std::string> out;
  for (int i = begin; i < end; ++i) out.push_back(tokens[i].text);
  return out;
}

std::string check_layout(const Mention& m, const Document& doc, const ContextMode& mode,
                         int max_len, const PseudoSentence& ps) {
  const auto& tok = ps.surface_tokens;
  const int n = ps.size();
  if (n > max_len) return "longer than max_len";
  if (n == 0 || tok.back() != kIsToken || ps.is_index != n - 1) return "[IS] not last";
  if (static_cast<int>(ps.segment_tags.size()) != n) return "segment length";
  const int occurrences_is = static_cast<int>(std::count(tok.begin(), tok.end(), kIsToken));
  if (occurrences_is != 1) return "[IS] count";

  int pos = 0;
  if (mode.has_overlap()) {
    const OverlapInfo ov = compute_overlap(m, doc);
    if (n < 2 || tok[0] != (ov.same_string ? kStrMatchToken : kStrNoMatchToken) ||
        tok[1] != (ov.same_head ? kHeadMatchToken : kHeadNoMatchToken)) {
      return "overlap tokens";
    }
    if (ps.segment_tags[0] != 0 || ps.segment_tags[1] != 0) return "overlap segments";
    pos = 2;
  } else if (std::count_if(tok.begin(), tok.end(), [](const std::string& t) {
               return t == kStrMatchToken || t == kStrNoMatchToken || t == kHeadMatchToken || t == kHeadNoMatchToken;
             }) != 0) {
    return "unexpected overlap token";
  }

  const auto delim = std::find(tok.begin(), tok.end(), kDelimToken);
  int mention_begin = pos;
  if (mode.has_context()) {
    if (std::count(tok.begin(), tok.end(), kDelimToken) != 1) return "[DELIM] count";
    const int d = static_cast<int>(delim - tok.begin());
    if (!ps.delimiter_index || *ps.delimiter_index != d) return "delimiter_index";
    // Context: suffix of the window sentences.
    std::vector<std::string> window;
    const int s0 = std::max(0, m.sentence_index - mode.prev_sentence_window);
    for (int s = s0; s <= m.sentence_index; ++s) {
      const auto& st = doc.sentences[s].tokens;
      for (const auto& t : folded(st, 0, static_cast<int>(st.size()))) window.push_back(t);
    }
    const std::vector<std::string> ctx(tok.begin() + pos, tok.begin() + d);
    if (ctx.size() > window.size() ||
        !std::equal(ctx.begin(), ctx.end(), window.end() - static_cast<long>(ctx.size()))) {
      return "context is not a suffix of the window";
    }
    if (!ps.context_truncated && ctx.size() != window.size()) return "unflagged context cut";
    if (ps.context_truncated && ctx.size() == window.size()) return "spurious context flag";
    for (int i = pos; i < d; ++i) {
      if (ps.segment_tags[i] != 0) return "context segment";
    }
    if (ps.segment_tags[d] != 1) return "delimiter segment";
    mention_begin = d + 1;
  } else if (delim != tok.end() || ps.delimiter_index) {
    return "unexpected [DELIM]";
  }

  const auto& sentence = doc.sentences[m.sentence_index].tokens;
  const auto mention = folded(sentence, m.start, m.end);
  const std::vector<std::string> got(tok.begin() + mention_begin, tok.end() - 1);
  if (got.size() > mention.size() || !std::equal(got.begin(), got.end(), mention.begin())) {
    return "mention tokens";
  }
  if (!ps.truncated && got.size() != mention.size()) return "unflagged mention cut";
  if (ps.truncated && got.size() == mention.size()) return "spurious truncation flag";
  if (got.empty()) return "mention removed entirely";
  for (int i = mention_begin; i < n; ++i) {
    if (ps.segment_tags[i] != 1) return "mention segment";
  }
  if (ps.truncated && (n != max_len || mention_begin != pos + (mode.has_context() ? 1 : 0))) {
    return "mention cut while room remained";
  }
  return {};
}

Outcome pseudo_sentence_invariants() {
  std::vector<Corpus> corpora;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    corpora.push_back(generate_synthetic({.seed = seed, .n_docs = 6,
                                          .sentences_per_doc = 3 + static_cast<int>(seed),
                                          .mentions_per_sentence = 2 + static_cast<int>(seed)}));
  }
  // Case variation and long mentions exercise folding and mention truncation.
  Corpus odd = corpora[0];
  for (auto& doc : odd.documents) {
    for (auto& s : doc.sentences) {
      for (std::size_t i = 0; i < s.tokens.size(); i += 2) {
        std::transform(s.tokens[i].text.begin(), s.tokens[i].text.end(),
                       s.tokens[i].text.begin(), [](unsigned char ch) { return std::toupper(ch); });
      }
    }
    for (auto& m : doc.mentions) {
      m.start = 0;
      m.head_index = m.end - 1;
    }
  }
  corpora.push_back(odd);

  std::size_t checked = 0;
  std::size_t truncated = 0;
  std::size_t context_cut = 0;
  std::string first_error;
  for (const Corpus& corpus : corpora) {
    for (const Document& doc : corpus.documents) {
      for (const Mention& m : doc.mentions) {
        for (ContextKind kind : {ContextKind::kMentionOnly, ContextKind::kLocalContext,
                                 ContextKind::kLocalContextOverlap}) {
          for (int window : {0, 1, 3}) {
            for (int max_len : {5, 6, 8, 12, 20, 64}) {
              const ContextMode mode{kind, window};
              if (max_len < reserved_token_count(mode) + 1) continue;
              const PseudoSentence ps = build_pseudo_sentence(m, doc, mode, max_len);
              const std::string err = check_layout(m, doc, mode, max_len, ps);
              if (!err.empty() && first_error.empty()) {
                first_error = doc.id + "/" + m.id + " " + std::string(context_kind_name(kind)) +
                              " max_len " + std::to_string(max_len) + ": " + err;
              }
              ++checked;
              truncated += ps.truncated;
              context_cut += ps.context_truncated;
            }
          }
        }
      }
    }
  }
  const bool pass = first_error.empty() && truncated > 0 && context_cut > 0;
  return {pass, first_error.empty()
                    ? fmt("%zu pseudo sentences (%zu mention cuts, %zu context cuts)", checked,
                          truncated, context_cut)
                    : first_error};
}

// 7. score() against a brute-force recount.
Outcome metrics_oracle() {
  std::size_t mismatches = 0;
  for (std::uint64_t trial = 0; trial < 1000; ++trial) {
    SplitMix64 rng(5000 + trial);
    const std::size_t n = 1 + rng.below(300);
    const std::size_t classes = 1 + rng.below(kNumLabels);
    std::vector<ISLabel> pred(n);
    std::vector<ISLabel> gold(n);
    for (std::size_t i = 0; i < n; ++i) {
      gold[i] = label_from_index(rng.below(classes));
      pred[i] = rng.uniform() < 0.5 ? gold[i] : label_from_index(rng.below(kNumLabels));
    }
    const EvalReport r = score(pred, gold);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) correct += pred[i] == gold[i];
    if (r.n != n || r.accuracy != static_cast<double>(correct) / static_cast<double>(n)) {
      ++mismatches;
    }
    for (ISLabel l : kAllLabels) {
      std::size_t tp = 0;
      std::size_t fp = 0;
      std::size_t fn = 0;
      for (std::size_t i = 0; i < n; ++i) {
        tp += pred[i] == l && gold[i] == l;
        fp += pred[i] == l && gold[i] != l;
        fn += pred[i] != l && gold[i] == l;
      }
      const double p = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
      const double rc = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
      const double f = p + rc == 0.0 ? 0.0 : 2.0 * p * rc / (p + rc);
      const ClassMetrics& m = r[l];
      if (m.precision != p || m.recall != rc || m.f1 != f || m.support != tp + fn) ++mismatches;
      for (ISLabel o : kAllLabels) {
        std::size_t cell = 0;
        for (std::size_t i = 0; i < n; ++i) cell += gold[i] == l && pred[i] == o;
        if (r.confusion[label_index(l)][label_index(o)] != cell) ++mismatches;
      }
    }
  }
  using L = ISLabel;
  const std::vector<L> hp = {L::kOld, L::kOld, L::kNew};
  const std::vector<L> hg = {L::kOld, L::kNew, L::kNew};
  const EvalReport h = score(hp, hg);
  const bool hand = std::abs(h.accuracy - 2.0 / 3.0) < 1e-15 &&
                    std::abs(h[L::kOld].f1 - 2.0 / 3.0) < 1e-15 &&
                    std::abs(h[L::kNew].f1 - 2.0 / 3.0) < 1e-15;
  return {mismatches == 0 && hand,
          fmt("1000 random vectors, %zu mismatches; hand case %s", mismatches,
              hand ? "ok" : "wrong")};
}

// 8. Randomization test: identity and agreement with exact enumeration.
double exact_p(const std::vector<ISLabel>& a, const std::vector<ISLabel>& b,
               const std::vector<ISLabel>& gold, const TestStatistic& stat) {
  const std::size_t n = gold.size();
  const double observed = std::abs(stat(a, gold) - stat(b, gold));
  std::size_t hits = 0;
  std::vector<ISLabel> sa(n);
  std::vector<ISLabel> sb(n);
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) {
      const bool swap = (mask >> i) & 1;
      sa[i] = swap ? b[i] : a[i];
      sb[i] = swap ? a[i] : b[i];
    }
    hits += std::abs(stat(sa, gold) - stat(sb, gold)) >= observed - 1e-12;
  }
  return static_cast<double>(hits) / static_cast<double>(1ULL << n);
}

Outcome randomization() {
  SplitMix64 rng(77);
  std::vector<ISLabel> gold(200);
  std::vector<ISLabel> same(200);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    gold[i] = label_from_index(rng.below(kNumLabels));
    same[i] = label_from_index(rng.below(kNumLabels));
  }
  const bool identity = randomization_test(same, same, gold, 1000, 1) == 1.0 &&
                        randomization_test(same, same, gold, 1000, 2,
                                           {ISLabel::kBridging}) == 1.0;

  constexpr int kRounds = 100000;
  double worst_z = 0.0;
  std::string worst;
  for (int n = 1; n <= 10; ++n) {
    for (const TestStatistic stat : {TestStatistic{}, TestStatistic{ISLabel::kOld}}) {
      std::vector<ISLabel> a(n);
      std::vector<ISLabel> b(n);
      std::vector<ISLabel> g(n);
      for (int i = 0; i < n; ++i) {
        g[i] = label_from_index(rng.below(3));
        a[i] = rng.uniform() < 0.7 ? g[i] : label_from_index(rng.below(3));
        b[i] = rng.uniform() < 0.4 ? g[i] : label_from_index(rng.below(3));
      }
      const double exact = exact_p(a, b, g, stat);
      const double mc_stat = randomization_test(a, b, g, kRounds, 1000 + n, stat);
      const double se = std::sqrt(exact * (1.0 - exact) / kRounds);
      const double slack = 1.0 / (kRounds + 1);  // the +1 of the estimator
      const double dev = std::abs(mc_stat - exact);
      const double z = dev <= slack ? 0.0 : (dev - slack) / std::max(se, 1e-300);
      if (z > worst_z) {
        worst_z = z;
        worst = fmt("n=%d %s: exact %.5f mc %.5f", n, stat.f1_of ? "f1(old)" : "accuracy", exact,
                    mc_stat);
      }
    }
  }
  return {identity && worst_z <= 3.0,
          fmt("identical systems p=1: %s; worst deviation %.2f SE%s%s", identity ? "yes" : "no",
              worst_z, worst.empty() ? "" : " at ", worst.c_str())};
}

// 9. CLI reruns produce byte-identical artifacts.
std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Relative path -> contents, for every regular file under root.
std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = read_bytes(e.path());
  }
  return files;
}

int run_in(const fs::path& dir, const std::string& args, const std::string& stdout_name) {
  const std::string cmd = "cd '" + dir.string() + "' && '" INFOSTAT_CLI_PATH "' " + args +
                          " > '" + stdout_name + "' 2>/dev/null";
  return std::system(cmd.c_str());
}

Outcome cli_determinism() {
  const fs::path root = fs::temp_directory_path() /
                        ("infostat_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const std::string small =
      " --layers 1 --d-model 16 --heads 2 --d-ff 32 --max-len 32 --epochs 2 --batch-size 8";
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gen", "gen-synthetic --seed 7 --docs 6 --sentences 4 --mentions 3 --out corpus.json"},
      {"stats", "stats --corpus corpus.json"},
      {"vocab", "build-vocab --corpus corpus.json --mode context2 --max-len 32 --out vocab.txt"},
      {"dump", "dump-pseudo --corpus corpus.json --mode context1 --window 1 --max-len 32 "
               "--out pseudo.jsonl"},
      {"train", "train --corpus corpus.json --mode context2 --out-dir train" + small},
      {"predict", "predict --model train/model --vocab train/vocab.txt --corpus corpus.json "
                  "--out predictions.jsonl"},
      {"cv", "crossval --corpus corpus.json --mode context2 --k 3 --out-dir cv" + small},
      {"cv_mo", "crossval --corpus corpus.json --mode mention-only --k 3 --out-dir cv_mo" + small},
      {"sig", "sigtest --a cv/predictions.jsonl --b cv_mo/predictions.jsonl --rounds 2000 "
              "--seed 3"},
      {"sig_self", "sigtest --a cv/predictions.jsonl --b cv/predictions.jsonl --rounds 500"},
      {"grad", "grad-check --layers 1 --d-model 8 --heads 2 --d-ff 16 --max-len 24 --seed 2"},
  };
  std::vector<std::map<std::string, std::string>> runs;
  std::string failure;
  for (const char* run : {"a", "b", "jobs"}) {
    const fs::path dir = root / run;
    fs::create_directories(dir);
    for (const auto& [name, args] : commands) {
      std::string a = args;
      if (std::string(run) == "jobs" && name.rfind("cv", 0) == 0) a += " --jobs 3";
      if (run_in(dir, a, name + ".stdout") != 0 && failure.empty()) {
        failure = std::string(run) + ": " + name + " exited non-zero";
      }
    }
    runs.push_back(snapshot(dir));
  }
  std::size_t differing = 0;
  std::string first_diff;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].size() != runs[0].size()) ++differing;
    for (const auto& [path, bytes] : runs[0]) {
      const auto it = runs[r].find(path);
      if (it == runs[r].end() || it->second != bytes) {
        ++differing;
        if (first_diff.empty()) first_diff = path;
      }
    }
  }
  const bool self_p = runs[0]["sig_self.stdout"].find("p-value 1.000000") != std::string::npos;
  fs::remove_all(root);
  const bool pass = failure.empty() && differing == 0 && self_p && runs[0].size() > 20;
  if (!failure.empty()) return {false, failure};
  return {pass, fmt("%zu artifacts x 3 runs (second rerun with --jobs 3), %zu differ%s%s; "
                    "sigtest self p=1: %s",
                    runs[0].size(), differing, first_diff.empty() ? "" : ", first ",
                    first_diff.c_str(), self_p ? "yes" : "no")};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0 = none
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace infostat

int main(int argc, char** argv) {
  using namespace infostat;
  const std::vector<Criterion> criteria = {
      {1, "gradient fidelity", 60, gradient_fidelity},
      {2, "attention normalization", 0, attention_normalization},
      {3, "padding inertness", 0, padding_inertness},
      {4, "overfit capacity", 300, overfit_capacity},
      {5, "context ablation", 1800, context_ablation},
      {6, "pseudo-sentence invariants", 0, pseudo_sentence_invariants},
      {7, "metrics oracle", 0, metrics_oracle},
      {8, "randomization test", 0, randomization},
      {9, "CLI determinism", 0, cli_determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = o.pass;
    std::string timing = fmt("%.1f s", secs);
    if (c.budget_seconds > 0) {
      timing += fmt(" of %.0f s budget", c.budget_seconds);
      if (secs >= c.budget_seconds) pass = false;
    }
    std::printf("%s  %d. %s: %s [%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
    failed += !pass;
  }
  return failed == 0 ? 0 : 1;
}
