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

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "doctest.h"
#include "infostat/corpus.hpp"
#include "infostat/labels.hpp"

namespace fs = std::filesystem;

namespace infostat {
namespace {

constexpr const char* kCli = INFOSTAT_CLI_PATH;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Sandbox {
 public:
  Sandbox() : dir_(fs::temp_directory_path() / ("infostat_cli_" + std::to_string(::getpid()))) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Sandbox() { fs::remove_all(dir_); }

  Run run(const std::string& args, const std::string& env = "") const {
    const std::string cmd = "cd '" + dir_.string() + "' && " + env + " '" + kCli + "' " + args +
                            " > out.txt 2> err.txt";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(dir_ / "out.txt"),
            slurp(dir_ / "err.txt")};
  }
  fs::path path(const std::string& name) const { return dir_ / name; }

 private:
  fs::path dir_;
};

const std::string kSmall =
    " --layers 1 --d-model 8 --heads 2 --d-ff 16 --max-len 24 --epochs 1 --batch-size 8";

TEST_SUITE("cli" * doctest::skip(std::string(kCli).empty())) {
  TEST_CASE("gen-synthetic writes a loadable corpus and its histogram") {
    const Sandbox box;
    const Run r = box.run("gen-synthetic --seed 7 --docs 3 --out c.json");
    REQUIRE(r.code == 0);
    const Corpus corpus = load_corpus(box.path("c.json"));
    const CorpusStats stats = corpus_stats(corpus);
    for (ISLabel l : kAllLabels) {
      std::istringstream lines(r.out);
      std::string line;
      bool found = false;
      while (std::getline(lines, line)) {
        std::istringstream fields(line);
        std::string name;
        std::size_t count = 0;
        if (fields >> name >> count && name == label_name(l)) {
          CHECK(count == stats[l].count);
          found = true;
        }
      }
      CHECK(found);
    }
    CHECK(r.out.find("total") != std::string::npos);

    CHECK(box.run("gen-synthetic --docs 3 --out e.json", "INFOSTAT_SEED=7").code == 0);
    CHECK(slurp(box.path("e.json")) == slurp(box.path("c.json")));
  }

  TEST_CASE("input errors exit 1, divergence exits 2") {
    const Sandbox box;
    CHECK(box.run("").code == 1);
    CHECK(box.run("--help").code == 0);
    CHECK(box.run("stats --corpus missing.json").code == 1);
    REQUIRE(box.run("gen-synthetic --docs 2 --sentences 3 --mentions 2 --out c.json").code == 0);
    Run r = box.run("crossval --corpus c.json --mode sideways --out-dir x");
    CHECK(r.code == 1);
    CHECK(r.err.find("sideways") != std::string::npos);
    CHECK(box.run("train --corpus c.json" + kSmall).code == 1);  // no --out-dir
    r = box.run("train --corpus c.json --out-dir t --lr 1e300 --epochs 3" + kSmall);
    CHECK(r.code == 2);
    CHECK(r.err.find("diverged") != std::string::npos);
    CHECK(fs::exists(box.path("t/last_finite/manifest.json")));
  }

  TEST_CASE("predict refuses a vocabulary the checkpoint was not trained with") {
    const Sandbox box;
    REQUIRE(box.run("gen-synthetic --docs 3 --sentences 3 --mentions 2 --out c.json").code == 0);
    REQUIRE(box.run("train --corpus c.json --out-dir t" + kSmall).code == 0);
    CHECK(fs::exists(box.path("t/model/tensors.bin")));
    CHECK(fs::exists(box.path("t/train_log.json")));
    CHECK(fs::exists(box.path("t/config.json")));
    Run r = box.run("predict --model t/model --vocab t/vocab.txt --corpus c.json --out p.jsonl");
    CHECK(r.code == 0);
    REQUIRE(box.run("build-vocab --corpus c.json --max-len 24 --min-freq 5 --out v.txt").code == 0);
    r = box.run("predict --model t/model --vocab v.txt --corpus c.json");
    CHECK(r.code == 1);
    CHECK(r.err.find("vocab mismatch") != std::string::npos);
  }

  TEST_CASE("crossval layout, snapshot rerun and sigtest") {
    const Sandbox box;
    REQUIRE(box.run("gen-synthetic --docs 4 --sentences 3 --mentions 2 --out c.json").code == 0);
    REQUIRE(box.run("crossval --corpus c.json --k 2 --out-dir cv" + kSmall).code == 0);
    for (const char* f : {"report.json", "predictions.jsonl", "config.json",
                          "fold_0/predictions.jsonl", "fold_1/model/manifest.json",
                          "fold_1/vocab.txt"}) {
      CHECK_MESSAGE(fs::exists(box.path("cv") / f), f);
    }
    REQUIRE(box.run("crossval --config cv/config.json --out-dir cv2").code == 0);
    CHECK(slurp(box.path("cv/report.json")) == slurp(box.path("cv2/report.json")));
    CHECK(slurp(box.path("cv/predictions.jsonl")) == slurp(box.path("cv2/predictions.jsonl")));

    Run r = box.run("sigtest --a cv/predictions.jsonl --b cv2/predictions.jsonl --rounds 200");
    CHECK(r.code == 0);
    CHECK(r.out.find("p-value 1.000000") != std::string::npos);
    r = box.run("sigtest --a cv/predictions.jsonl --b cv/predictions.jsonl "
                "--statistic f1:mediated/bridging --rounds 200");
    CHECK(r.code == 0);
    CHECK(box.run("sigtest --a cv/predictions.jsonl --b cv/fold_0/predictions.jsonl").code == 1);
    CHECK(box.run("sigtest --a cv/predictions.jsonl --b cv/predictions.jsonl --statistic median")
              .code == 1);
  }

  TEST_CASE("grad-check passes on a small model") {
    const Sandbox box;
    const Run r = box.run("grad-check --layers 1 --d-model 8 --heads 2 --d-ff 16 --max-len 24");
    CHECK(r.code == 0);
    CHECK(r.out.find("max relative error") != std::string::npos);
  }
}

}  // namespace
}  // namespace infostat
