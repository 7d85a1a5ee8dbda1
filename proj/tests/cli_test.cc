// Copyright 2026 The kgseek Authors
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


// End-to-end runs of the kgseek binary.

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code = -1;
  std::string output;  // stdout and stderr interleaved
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("kgseek_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write("films.tsv",
          "GL\tdirected\tSW\nGL\tdirected\tESB\nSW\tstarred\tMH\nSW\tstarred\tHF\n"
          "ESB\tstarred\tMH\n");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
  }

  std::string read(const std::string& name) const {
    std::ifstream in(path(name));
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }

  CliResult run(const std::string& args) const {
    const std::string cmd =
        "cd '" + dir_.string() + "' && '" KGSEEK_CLI_PATH "' " + args + " 2>&1";
    CliResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
  }

  fs::path dir_;
};

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

TEST_F(CliTest, LoadPrintsStats) {
  CliResult r = run("load -g films.tsv");
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(r.output, "entities=5 relations=3 edges=5\n");
  EXPECT_TRUE(contains(run("load -g films.tsv --inverses").output, "relations=5 edges=10"));
}

TEST_F(CliTest, LoadErrors) {
  CliResult missing = run("load -g nope.tsv");
  EXPECT_EQ(missing.code, 2);
  write("bad.tsv", "a\tr\tb\nbroken line\n");
  CliResult bad = run("load -g bad.tsv");
  EXPECT_EQ(bad.code, 2);
  EXPECT_TRUE(contains(bad.output, "line 2")) << bad.output;
}

TEST_F(CliTest, SeekWithOracleScorer) {
  CliResult r = run("seek -g films.tsv --anchors GL --scorer oracle --gold 'directed starred' --beam 1");
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(contains(r.output, "rank,nll,sequence,candidate_count\n1,")) << r.output;
  EXPECT_TRUE(contains(r.output, ",self directed starred,2\n")) << r.output;
  EXPECT_TRUE(contains(r.output, "scorer_calls=3")) << r.output;
}

TEST_F(CliTest, SeekUnknownAnchorIsBadInput) {
  CliResult r = run("seek -g films.tsv --anchors Nobody");
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.output, "Nobody")) << r.output;
}

TEST_F(CliTest, SeekWarnsWhenFewerThanK) {
  write("one.tsv", "a\tr\tb\n");
  CliResult r = run("seek -g one.tsv --anchors a -k 3 --beam 3 --steps 1");
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(contains(r.output, "1,0,self r,1\n")) << r.output;
  EXPECT_FALSE(contains(r.output, "\n2,"));
  EXPECT_TRUE(contains(r.output, "warning")) << r.output;
}

TEST_F(CliTest, QueryAndCover) {
  const std::string q = "'(select ?x (and (directed $GL ?v) (starred ?v ?x)))'";
  CliResult query = run("query -g films.tsv --query " + q);
  EXPECT_EQ(query.code, 0) << query.output;
  EXPECT_EQ(query.output, "HF|MH\n");
  CliResult cover = run("cover -g films.tsv --query " + q);
  EXPECT_EQ(cover.code, 0) << cover.output;
  EXPECT_TRUE(contains(cover.output, "self directed starred")) << cover.output;
  CliResult forall = run("query -g films.tsv --query '(select ?x (forall ?v (directed $GL ?v)))'");
  EXPECT_EQ(forall.code, 2) << forall.output;
}

TEST_F(CliTest, VerifyQuickAndInjectedFault) {
  CliResult ok = run("verify --quick");
  EXPECT_EQ(ok.code, 0) << ok.output;
  for (const char* suite : {"coalesce:", "beam:", "prop1:", "weak_labels:"}) {
    EXPECT_TRUE(contains(ok.output, suite)) << ok.output;
  }
  CliResult fault = run("verify --quick --inject-fault");
  EXPECT_EQ(fault.code, 4) << fault.output;
  EXPECT_TRUE(contains(fault.output, "seed")) << fault.output;
}

TEST_F(CliTest, EvalRejectsEmptyDataset) {
  write("empty.tsv", "");
  CliResult r = run("eval -g films.tsv -d empty.tsv --scorer uniform");
  EXPECT_NE(r.code, 0);
  EXPECT_TRUE(contains(r.output, "0 examples")) << r.output;
}

TEST_F(CliTest, BadSimdChoiceIsBadInput) {
  EXPECT_EQ(run("--simd bogus load -g films.tsv").code, 2);
  EXPECT_EQ(run("--simd scalar load -g films.tsv").code, 0);
}

TEST_F(CliTest, TrainThenEvalPrintsBothVariants) {
  ASSERT_EQ(run("--out . --seed 3 synth --task intersection --questions 60").code, 0);
  CliResult train = run("--out . train -g graph.tsv -d qa.tsv --epochs 2 --dim 8");
  ASSERT_EQ(train.code, 0) << train.output;
  EXPECT_TRUE(fs::exists(path("scorer.ckpt")));
  EXPECT_TRUE(fs::exists(path("train_loss.csv")));
  CliResult refiner =
      run("--out . train-refiner -g graph.tsv -d qa.tsv --scorer oracle --epochs 3");
  ASSERT_EQ(refiner.code, 0) << refiner.output;
  CliResult eval = run("--out . eval -g graph.tsv -d qa.tsv --scorer featurized --checkpoint "
                 "scorer.ckpt --refiner refiner.ckpt");
  ASSERT_EQ(eval.code, 0) << eval.output;
  EXPECT_TRUE(contains(eval.output, "hits@1 unrefined=")) << eval.output;
  EXPECT_TRUE(contains(eval.output, "hits@1 refined=")) << eval.output;
  EXPECT_TRUE(fs::exists(path("eval.csv")));
}

TEST_F(CliTest, CheckpointImpliesFeaturizedScorer) {
  ASSERT_EQ(run("--out . --seed 2 synth --entities 200 --relations 5 --questions 80").code, 0);
  ASSERT_EQ(run("--out . train -g graph.tsv -d qa.tsv --epochs 20 --dim 16").code, 0);
  CliResult implied = run("--out . eval -g graph.tsv -d qa.tsv --checkpoint scorer.ckpt");
  CliResult named =
      run("--out . eval -g graph.tsv -d qa.tsv --scorer featurized --checkpoint scorer.ckpt");
  ASSERT_EQ(implied.code, 0) << implied.output;
  EXPECT_EQ(implied.output, named.output);
  EXPECT_EQ(run("seek -g graph.tsv --anchors e0 --scorer featurized").code, 2);
}

TEST_F(CliTest, ReportsAreByteIdenticalForFixedSeed) {
  fs::create_directories(dir_ / "a");
  fs::create_directories(dir_ / "b");
  for (const char* out : {"a", "b"}) {
    const std::string o = std::string("--out ") + out + " --seed 5 ";
    ASSERT_EQ(run(o + "synth --entities 200 --relations 4 --questions 30").code, 0);
    const std::string g = std::string(" -g ") + out + "/graph.tsv -d " + out + "/qa.tsv";
    ASSERT_EQ(run(o + "labels" + g).code, 0);
    ASSERT_EQ(run(o + "train --epochs 2 --dim 8" + g).code, 0);
    ASSERT_EQ(run(o + "eval --scorer featurized --checkpoint " + out + "/scorer.ckpt" + g).code,
              0);
  }
  for (const char* file : {"graph.tsv", "qa.tsv", "labels.csv", "train_loss.csv", "scorer.ckpt",
                           "eval.csv"}) {
    const std::string a = read(std::string("a/") + file);
    EXPECT_FALSE(a.empty()) << file;
    EXPECT_EQ(a, read(std::string("b/") + file)) << file;
  }
  EXPECT_EQ(read("a/labels.csv").rfind("# seed=5\n", 0), 0u);
}

TEST_F(CliTest, BenchEmitsOneFilePerFigure) {
  CliResult r = run(
      "--out . bench --entity-sizes 100 300 --relation-sizes 1 3 --fixed-entities 300 "
      "--questions 10 --warmup 2 --iters 20 --emit-plots-data");
  ASSERT_EQ(r.code, 0) << r.output;
  for (const char* f : {"bench_throughput.csv", "fig5a.csv", "fig5b.csv", "fig5d.csv", "fig4.csv",
                        "fig7.csv", "bench_preprocess.csv"}) {
    EXPECT_TRUE(fs::exists(path(f))) << f;
    EXPECT_EQ(read(f).rfind("# seed=", 0), 0u) << f;
  }
}

TEST_F(CliTest, ConfigFileValuesYieldToFlags) {
  write("run.ini", "beam=1\nk=1\n");
  CliResult from_file = run("--config run.ini seek -g films.tsv --anchors GL");
  EXPECT_EQ(from_file.code, 0) << from_file.output;
  EXPECT_FALSE(contains(from_file.output, "\n2,")) << from_file.output;
  CliResult overridden = run("--config run.ini seek -g films.tsv --anchors GL --beam 4 -k 2");
  EXPECT_EQ(overridden.code, 0) << overridden.output;
  EXPECT_TRUE(contains(overridden.output, "\n2,")) << overridden.output;
}

}  // namespace
