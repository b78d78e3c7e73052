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

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "infostat/checkpoint.hpp"
#include "infostat/context.hpp"
#include "infostat/corpus.hpp"
#include "infostat/crossval.hpp"
#include "infostat/errors.hpp"
#include "infostat/eval.hpp"
#include "infostat/train.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;

namespace infostat::cli {
namespace {

constexpr double kGradCheckTolerance = 1e-4;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw InputError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("write failed for " + path.string());
}

fs::path require_out_dir(const RunConfig& c) {
  if (c.out_dir.empty()) throw InputError("--out-dir is required");
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec) throw InputError("cannot create " + c.out_dir + ": " + ec.message());
  return c.out_dir;
}

void write_snapshot(const fs::path& dir, const std::string& command, const RunConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j.update(run_config_json(c));
  write_text(dir / "config.json", j.dump(2) + "\n");
}

Corpus load_run_corpus(const RunConfig& c) {
  if (c.corpus.empty()) throw InputError("--corpus is required");
  return load_corpus(c.corpus);
}

void print_histogram(const CorpusStats& stats) {
  std::printf("%-26s %8s %9s\n", "label", "count", "fraction");
  for (ISLabel l : kAllLabels) {
    std::printf("%-26s %8zu %9.4f\n", std::string(label_name(l)).c_str(), stats[l].count,
                stats[l].fraction);
  }
  std::printf("%-26s %8zu\n", "total", stats.total);
}

void print_report(const EvalReport& r) {
  std::printf("accuracy %.4f (n=%zu)\n", r.accuracy, r.n);
  std::printf("%-26s %7s %7s %7s %8s\n", "label", "P", "R", "F1", "support");
  for (ISLabel l : kAllLabels) {
    const ClassMetrics& m = r[l];
    std::printf("%-26s %7.4f %7.4f %7.4f %8zu\n", std::string(label_name(l)).c_str(),
                m.precision, m.recall, m.f1, m.support);
  }
}

nlohmann::json checkpoint_metadata(const Vocab& vocab, const RunConfig& c) {
  return {{"vocab_fingerprint", vocab.fingerprint()},
          {"mode", context_kind_name(c.mode.kind)},
          {"window", c.mode.prev_sentence_window},
          {"seed", c.seed}};
}

PredictionRecord to_record(const std::string& document_id, const Mention& m,
                           const Prediction& p) {
  return {document_id, m.id, m.label, p.label, p.probabilities};
}

// Shared run-configuration flags.
void add_run_flags(CLI::App* cmd, Overrides& o, bool model_flags, bool train_flags) {
  cmd->add_option("--config", o.config_path, "JSON run config; flags take precedence")
      ->check(CLI::ExistingFile);
  cmd->add_option("--corpus", o.corpus, "Corpus JSON file");
  cmd->add_option("--mode", o.mode, "mention-only | context1 | context2");
  cmd->add_option("--window", o.window, "Preceding sentences added to the context");
  cmd->add_option("--max-len", o.max_len, "Pseudo-sentence length");
  cmd->add_option("--seed", o.seed, "Seed (falls back to INFOSTAT_SEED)");
  if (model_flags) {
    cmd->add_flag("--paper-scale", o.paper_scale,
                  "12 layers / 768 hidden / 12 heads / 128 tokens, 3 epochs at 5e-5");
    cmd->add_option("--layers", o.n_layers, "Encoder layers");
    cmd->add_option("--d-model", o.d_model, "Hidden size");
    cmd->add_option("--heads", o.n_heads, "Attention heads");
    cmd->add_option("--d-ff", o.d_ff, "Feed-forward size");
    cmd->add_option("--dropout", o.dropout, "Dropout rate");
  }
  if (train_flags) {
    cmd->add_option("--epochs", o.epochs, "Training epochs");
    cmd->add_option("--lr", o.learning_rate, "Learning rate");
    cmd->add_option("--batch-size", o.batch_size, "Mini-batch size");
    cmd->add_option("--weight-decay", o.weight_decay, "Decoupled weight decay");
    cmd->add_option("--min-freq", o.min_freq, "Minimum token count for the vocabulary");
  }
}

struct GenSyntheticArgs {
  std::optional<std::uint64_t> seed;
  int docs = 10;
  int sentences = 8;
  int mentions = 4;
  std::string out;
};

void cmd_gen_synthetic(const GenSyntheticArgs& a) {
  SyntheticSpec spec;
  spec.seed = a.seed ? *a.seed : env_seed().value_or(1);
  spec.n_docs = a.docs;
  spec.sentences_per_doc = a.sentences;
  spec.mentions_per_sentence = a.mentions;
  const Corpus corpus = generate_synthetic(spec);
  write_text(a.out, serialize_corpus(corpus));
  print_histogram(corpus_stats(corpus));
}

void cmd_stats(const std::string& path, bool head_fallback) {
  print_histogram(corpus_stats(load_corpus(path, {.head_fallback = head_fallback})));
}

void cmd_build_vocab(const Overrides& o, const std::string& out) {
  const RunConfig c = resolve_run_config(o);
  const Vocab vocab = build_vocab(load_run_corpus(c), c.mode, c.model.max_len, c.min_freq);
  write_text(out, vocab.serialize());
  std::printf("vocab size %d fingerprint %s\n", vocab.size(), vocab.fingerprint().c_str());
}

void cmd_dump_pseudo(const Overrides& o, const std::string& out) {
  const RunConfig c = resolve_run_config(o);
  const Corpus corpus = load_run_corpus(c);
  std::string text;
  for (const Document& doc : corpus.documents) {
    for (const Mention& m : doc.mentions) {
      text += pseudo_sentence_json(m.id, build_pseudo_sentence(m, doc, c.mode, c.model.max_len));
      text += '\n';
    }
  }
  if (out.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    write_text(out, text);
  }
}

void cmd_train(const Overrides& o) {
  RunConfig c = resolve_run_config(o);
  const fs::path dir = require_out_dir(c);
  const Corpus corpus = load_run_corpus(c);
  corpus_stats(corpus);
  const Vocab vocab = build_vocab(corpus, c.mode, c.model.max_len, c.min_freq);
  c.model.vocab_size = vocab.size();
  write_snapshot(dir, "train", c);
  vocab.save(dir / "vocab.txt");

  const std::vector<Example> data = make_examples(corpus, c.mode, vocab, c.model.max_len);
  nlohmann::ordered_json log = nlohmann::ordered_json::array();
  const auto on_epoch = [&](const EpochStats& s, const Parameters&) {
    std::printf("epoch %d loss %.6f\n", s.epoch, s.mean_loss);
    std::fflush(stdout);
    log.push_back({{"epoch", s.epoch}, {"mean_loss", s.mean_loss}});
    return true;
  };
  TrainResult result;
  try {
    result = train(data, c.model, c.train, on_epoch);
  } catch (const TrainingDiverged& e) {
    save_checkpoint(e.last_finite(), c.model, dir / "last_finite",
                    checkpoint_metadata(vocab, c));
    write_text(dir / "train_log.json", log.dump(2) + "\n");
    throw;
  }
  save_checkpoint(result.params, c.model, dir / "model", checkpoint_metadata(vocab, c));
  write_text(dir / "train_log.json", log.dump(2) + "\n");

  const auto preds = predict(corpus, c.mode, vocab, result.params, c.model);
  std::size_t correct = 0;
  std::size_t i = 0;
  for (const Document& doc : corpus.documents) {
    for (const Mention& m : doc.mentions) correct += preds[i++].label == *m.label;
  }
  std::printf("training accuracy %.4f (n=%zu)\n",
              preds.empty() ? 0.0 : double(correct) / preds.size(), preds.size());
}

struct PredictArgs {
  std::string model;
  std::string vocab;
  std::string corpus;
  std::string out;
};

void cmd_predict(const PredictArgs& a) {
  const Checkpoint ckpt = load_checkpoint(a.model);
  const Vocab vocab = Vocab::load(a.vocab);
  const auto& meta = ckpt.metadata;
  if (!meta.contains("vocab_fingerprint") || !meta.contains("mode")) {
    throw InputError("checkpoint " + a.model + " lacks vocab_fingerprint / mode metadata");
  }
  const std::string expected = meta.at("vocab_fingerprint").get<std::string>();
  if (expected != vocab.fingerprint()) {
    throw InputError("vocab mismatch: checkpoint expects " + expected + ", " + a.vocab +
                     " has " + vocab.fingerprint());
  }
  if (vocab.size() != ckpt.config.vocab_size) {
    throw InputError("vocab mismatch: size differs from checkpoint");
  }
  ContextMode mode;
  mode.kind = parse_context_kind(meta.at("mode").get<std::string>());
  mode.prev_sentence_window = meta.value("window", 0);

  const Corpus corpus = load_corpus(a.corpus);
  std::vector<PredictionRecord> records;
  std::vector<ISLabel> preds;
  std::vector<ISLabel> gold;
  for (const Document& doc : corpus.documents) {
    const auto out = predict(doc.mentions, doc, mode, vocab, ckpt.params, ckpt.config);
    for (std::size_t i = 0; i < out.size(); ++i) {
      records.push_back(to_record(doc.id, doc.mentions[i], out[i]));
      if (doc.mentions[i].label) {
        preds.push_back(out[i].label);
        gold.push_back(*doc.mentions[i].label);
      }
    }
  }
  const std::string text = serialize_predictions(records);
  if (a.out.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  write_text(a.out, text);
  if (!gold.empty() && gold.size() == records.size()) print_report(score(preds, gold));
}

void cmd_crossval(const Overrides& o) {
  RunConfig c = resolve_run_config(o);
  const fs::path dir = require_out_dir(c);
  const Corpus corpus = load_run_corpus(c);
  write_snapshot(dir, "crossval", c);

  CrossValConfig cv;
  cv.mode = c.mode;
  cv.model = c.model;
  cv.train = c.train;
  cv.k = c.k;
  cv.seed = c.seed;
  cv.min_freq = c.min_freq;
  cv.jobs = c.jobs;
  const CrossValResult result = run_cross_validation(corpus, cv);

  for (const FoldResult& f : result.folds) {
    const fs::path fold_dir = dir / ("fold_" + std::to_string(f.fold));
    write_text(fold_dir / "predictions.jsonl", serialize_predictions(f.predictions));
    f.vocab.save(fold_dir / "vocab.txt");
    save_checkpoint(f.params, f.model, fold_dir / "model", checkpoint_metadata(f.vocab, c));
  }
  write_text(dir / "predictions.jsonl", serialize_predictions(result.pooled_predictions()));
  write_text(dir / "report.json", result.report_json().dump(2) + "\n");
  std::printf("mode %s, %d folds\n", std::string(context_kind_name(c.mode.kind)).c_str(), c.k);
  print_report(result.pooled);
}

struct GradCheckArgs {
  int examples = 2;
  double epsilon = 1e-5;
};

void cmd_grad_check(const Overrides& o, const GradCheckArgs& a) {
  RunConfig c = resolve_run_config(o);
  if (a.examples < 1) throw InputError("--examples must be >= 1");
  c.model.dropout_rate = 0.0;
  const Corpus corpus = generate_synthetic({.seed = c.seed, .n_docs = 1,
                                            .sentences_per_doc = 2,
                                            .mentions_per_sentence = 2});
  const Vocab vocab = build_vocab(corpus, c.mode, c.model.max_len, 1);
  c.model.vocab_size = vocab.size();
  std::vector<Example> batch = make_examples(corpus, c.mode, vocab, c.model.max_len);
  // Take examples from the end, where the pseudo sentences are longest.
  if (static_cast<int>(batch.size()) > a.examples) {
    batch.erase(batch.begin(), batch.end() - a.examples);
  }
  const Parameters params = init_params(c.model, c.seed);
  const GradCheckReport report = gradient_check(batch, params, c.model, a.epsilon);

  std::printf("%-28s %9s %12s %12s\n", "tensor", "scalars", "max_rel", "max_abs");
  for (const auto& t : report.tensors) {
    std::printf("%-28s %9zu %12.3e %12.3e\n", t.name.c_str(), t.checked, t.max_rel_error,
                t.max_abs_error);
  }
  std::printf("max relative error %.3e\n", report.max_rel_error);
  if (!(report.max_rel_error < kGradCheckTolerance)) {
    throw NumericError("gradient check failed: max relative error " +
                       std::to_string(report.max_rel_error) + " >= 1e-4");
  }
}

struct SigtestArgs {
  std::string a;
  std::string b;
  int rounds = 10000;
  std::optional<std::uint64_t> seed;
  std::string statistic = "accuracy";
};

TestStatistic parse_statistic(const std::string& s) {
  if (s == "accuracy") return {};
  const std::string prefix = "f1:";
  if (s.rfind(prefix, 0) == 0) return {parse_label(s.substr(prefix.size()))};
  throw InputError("unknown statistic \"" + s + "\" (expected accuracy or f1:<label>)");
}

void cmd_sigtest(const SigtestArgs& a) {
  if (a.rounds < 1) throw InputError("--rounds must be >= 1");
  const TestStatistic stat = parse_statistic(a.statistic);
  const auto ra = load_predictions(a.a);
  const auto rb = load_predictions(a.b);
  using Key = std::pair<std::string, std::string>;
  std::map<Key, const PredictionRecord*> by_key;
  for (const auto& r : rb) {
    if (!by_key.emplace(Key{r.document_id, r.mention_id}, &r).second) {
      throw InputError("duplicate prediction for " + r.document_id + "/" + r.mention_id +
                       " in " + a.b);
    }
  }
  if (ra.size() != rb.size()) {
    throw InputError("prediction files cover different mentions (" +
                     std::to_string(ra.size()) + " vs " + std::to_string(rb.size()) + ")");
  }
  std::vector<ISLabel> pa;
  std::vector<ISLabel> pb;
  std::vector<ISLabel> gold;
  for (const auto& r : ra) {
    const auto it = by_key.find({r.document_id, r.mention_id});
    if (it == by_key.end()) {
      throw InputError("mention " + r.document_id + "/" + r.mention_id + " missing from " + a.b);
    }
    const PredictionRecord& other = *it->second;
    if (!r.gold || !other.gold) {
      throw InputError("mention " + r.document_id + "/" + r.mention_id + " has no gold label");
    }
    if (*r.gold != *other.gold) {
      throw InputError("gold labels disagree for " + r.document_id + "/" + r.mention_id);
    }
    pa.push_back(r.pred);
    pb.push_back(other.pred);
    gold.push_back(*r.gold);
  }
  const std::uint64_t seed = a.seed ? *a.seed : env_seed().value_or(1);
  const double sa = stat(pa, gold);
  const double sb = stat(pb, gold);
  const double p = randomization_test(pa, pb, gold, a.rounds, seed, stat);
  std::printf("statistic %s\n", a.statistic.c_str());
  std::printf("a %.6f\nb %.6f\n", sa, sb);
  std::printf("p-value %.6f\n", p);
}

int run(int argc, char** argv) {
  CLI::App app{"Information-status classification with a discourse-aware encoder"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", "infostat 0.1.0");

  GenSyntheticArgs gen;
  auto* c_gen = app.add_subcommand("gen-synthetic", "Write a rule-labeled synthetic corpus");
  c_gen->add_option("--seed", gen.seed, "Seed (falls back to INFOSTAT_SEED)");
  c_gen->add_option("--docs", gen.docs, "Documents")->check(CLI::PositiveNumber);
  c_gen->add_option("--sentences", gen.sentences, "Sentences per document")
      ->check(CLI::PositiveNumber);
  c_gen->add_option("--mentions", gen.mentions, "Mentions per sentence")
      ->check(CLI::PositiveNumber);
  c_gen->add_option("--out", gen.out, "Output corpus file")->required();

  std::string stats_corpus;
  bool head_fallback = false;
  auto* c_stats = app.add_subcommand("stats", "Print the label histogram of a corpus");
  c_stats->add_option("--corpus", stats_corpus, "Corpus JSON file")->required();
  c_stats->add_flag("--head-fallback", head_fallback,
                    "Use the last mention token when a head is missing");

  Overrides vocab_o;
  std::string vocab_out;
  auto* c_vocab = app.add_subcommand("build-vocab", "Build the vocabulary of a corpus");
  add_run_flags(c_vocab, vocab_o, false, false);
  c_vocab->add_option("--min-freq", vocab_o.min_freq, "Minimum token count");
  c_vocab->add_option("--out", vocab_out, "Output vocabulary file")->required();

  Overrides dump_o;
  std::string dump_out;
  auto* c_dump = app.add_subcommand("dump-pseudo", "Write pseudo sentences as JSON lines");
  add_run_flags(c_dump, dump_o, false, false);
  c_dump->add_option("--out", dump_out, "Output file (default stdout)");

  Overrides train_o;
  auto* c_train = app.add_subcommand("train", "Train on a whole corpus");
  add_run_flags(c_train, train_o, true, true);
  c_train->add_option("--out-dir", train_o.out_dir, "Output directory");

  PredictArgs pred;
  auto* c_pred = app.add_subcommand("predict", "Predict labels with a trained model");
  c_pred->add_option("--model", pred.model, "Checkpoint directory")->required();
  c_pred->add_option("--vocab", pred.vocab, "Vocabulary file of the checkpoint")->required();
  c_pred->add_option("--corpus", pred.corpus, "Corpus JSON file")->required();
  c_pred->add_option("--out", pred.out, "Prediction JSONL file (default stdout)");

  Overrides cv_o;
  auto* c_cv = app.add_subcommand("crossval", "Document-level k-fold cross-validation");
  add_run_flags(c_cv, cv_o, true, true);
  c_cv->add_option("--k", cv_o.k, "Folds");
  c_cv->add_option("--jobs", cv_o.jobs, "Folds trained in parallel");
  c_cv->add_option("--out-dir", cv_o.out_dir, "Output directory");

  Overrides gc_o;
  GradCheckArgs gc;
  auto* c_gc = app.add_subcommand("grad-check", "Compare analytic and numeric gradients");
  add_run_flags(c_gc, gc_o, true, false);
  c_gc->add_option("--examples", gc.examples, "Examples in the checked batch");
  c_gc->add_option("--epsilon", gc.epsilon, "Finite-difference step");

  SigtestArgs sig;
  auto* c_sig = app.add_subcommand("sigtest", "Approximate randomization test");
  c_sig->add_option("--a", sig.a, "Predictions of system A")->required();
  c_sig->add_option("--b", sig.b, "Predictions of system B")->required();
  c_sig->add_option("--rounds", sig.rounds, "Randomization rounds");
  c_sig->add_option("--seed", sig.seed, "Seed (falls back to INFOSTAT_SEED)");
  c_sig->add_option("--statistic", sig.statistic, "accuracy or f1:<label>");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (c_gen->parsed()) cmd_gen_synthetic(gen);
  if (c_stats->parsed()) cmd_stats(stats_corpus, head_fallback);
  if (c_vocab->parsed()) cmd_build_vocab(vocab_o, vocab_out);
  if (c_dump->parsed()) cmd_dump_pseudo(dump_o, dump_out);
  if (c_train->parsed()) cmd_train(train_o);
  if (c_pred->parsed()) cmd_predict(pred);
  if (c_cv->parsed()) cmd_crossval(cv_o);
  if (c_gc->parsed()) cmd_grad_check(gc_o, gc);
  if (c_sig->parsed()) cmd_sigtest(sig);
  return 0;
}

}  // namespace
}  // namespace infostat::cli

int main(int argc, char** argv) {
  try {
    return infostat::cli::run(argc, argv);
  } catch (const infostat::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
