// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "stylepipe/config.hpp"
#include "stylepipe/error.hpp"
#include "stylepipe/pipeline.hpp"

namespace sp = stylepipe;
namespace cfgns = stylepipe::config;
namespace pl = stylepipe::pipeline;
namespace fs = std::filesystem;

namespace {

const fs::path kDemo = STYLEPIPE_DEMO_DIR;

std::string error_code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const sp::Error& e) {
    return e.code();
  }
  return "";
}

// One pipeline run over a private copy of the demo, shared by the tests
// below because a full run is the expensive part.
class DemoRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fixtures::TempDir("pipe");
    fixtures::copy_demo(kDemo, dir_->path());
    auto cfg = cfgns::RunConfig::load(dir_->path() / "demo.toml");
    pl::Pipeline p(cfg);
    first_ = new std::vector<pl::StageOutcome>(p.run_all());
  }
  static void TearDownTestSuite() {
    delete first_;
    delete dir_;
  }
  static cfgns::RunConfig config() { return cfgns::RunConfig::load(dir_->path() / "demo.toml"); }

  static fixtures::TempDir* dir_;
  static std::vector<pl::StageOutcome>* first_;
};

fixtures::TempDir* DemoRun::dir_ = nullptr;
std::vector<pl::StageOutcome>* DemoRun::first_ = nullptr;

}  // namespace

// ----- config -----

TEST(Config, DemoLoadsAndValidates) {
  auto cfg = cfgns::RunConfig::load(kDemo / "demo.toml");
  EXPECT_EQ(cfg.domains.size(), 2u);
  EXPECT_EQ(cfg.domain("casual").domain.name, "casual");
  EXPECT_THROW(cfg.domain("nope"), sp::Error);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, SerializeParseRoundTrip) {
  auto cfg = cfgns::RunConfig::load(kDemo / "demo.toml");
  auto again = cfgns::RunConfig::parse_toml(cfg.to_toml(), kDemo);
  EXPECT_EQ(again.to_json(), cfg.to_json());
  EXPECT_EQ(again.fingerprint(), cfg.fingerprint());
  EXPECT_EQ(cfgns::RunConfig::from_json(cfg.to_json()).to_json(), cfg.to_json());
}

TEST(Config, FingerprintIgnoresWorkersAndWorkDir) {
  auto cfg = cfgns::RunConfig::load(kDemo / "demo.toml");
  auto other = cfg;
  other.workers = cfg.workers + 5;
  other.work_dir = "elsewhere";
  EXPECT_EQ(other.fingerprint(), cfg.fingerprint());
  other.seed = cfg.seed + 1;
  EXPECT_NE(other.fingerprint(), cfg.fingerprint());
}

TEST(Config, UnknownKeysRejected) {
  auto text = oracle::read_all(kDemo / "demo.toml");
  EXPECT_EQ(error_code_of([&] { cfgns::RunConfig::parse_toml(text + "\ncolour = 1\n", kDemo); }), "config");
  EXPECT_EQ(error_code_of([&] { cfgns::RunConfig::parse_toml("seed = [", kDemo); }), "config");
}

TEST(Config, EnvExpansion) {
  ::setenv("STYLEPIPE_TEST_VAR", "abc", 1);
  EXPECT_EQ(cfgns::expand_env("x/${STYLEPIPE_TEST_VAR}/y"), "x/abc/y");
  ::unsetenv("STYLEPIPE_TEST_VAR");
  EXPECT_EQ(cfgns::expand_env("${STYLEPIPE_TEST_VAR:-fallback}"), "fallback");
  EXPECT_EQ(cfgns::expand_env("${STYLEPIPE_TEST_VAR}"), "");
  EXPECT_THROW(cfgns::expand_env("${OPEN"), sp::Error);
}

TEST(Config, SynonymsTsv) {
  auto syn = cfgns::read_synonyms_tsv(kDemo / "synonyms.tsv");
  EXPECT_FALSE(syn.empty());
}

// ----- pipeline -----

TEST(ExitCodes, FailedBeatsDegraded) {
  std::vector<pl::StageOutcome> ok(2);
  EXPECT_EQ(pl::Pipeline::exit_code(ok), 0);
  ok[1].degraded = true;
  EXPECT_EQ(pl::Pipeline::exit_code(ok), pl::kExitDegraded);
  ok[0].failed = true;
  EXPECT_EQ(pl::Pipeline::exit_code(ok), pl::kExitFailed);
}

TEST(Stages, NamesRoundTrip) {
  for (auto s : pl::all_stages()) EXPECT_EQ(pl::stage_from_string(pl::to_string(s)), s);
  EXPECT_THROW(pl::stage_from_string("train"), sp::Error);
  EXPECT_EQ(pl::Pipeline::slug("rulebook LLM (direct, 0-shot)").find(' '), std::string::npos);
}

TEST_F(DemoRun, EveryStageRanCleanly) {
  ASSERT_EQ(first_->size(), pl::all_stages().size());
  for (const auto& o : *first_) {
    EXPECT_FALSE(o.failed) << pl::to_string(o.stage) << ": " << o.message;
    EXPECT_FALSE(o.skipped);
  }
  EXPECT_EQ(pl::Pipeline::exit_code(*first_), 0);
  const auto work = dir_->path() / "work";
  for (const auto* f : {"report.json", "report.csv", "report.md"}) EXPECT_TRUE(fs::exists(work / f)) << f;
  EXPECT_TRUE(fs::exists(work / "formal" / "train_manifest.json"));
}

// Every recorded input is either a config-named file or an output of an
// earlier stage, so the manifests describe an acyclic, complete graph.
TEST_F(DemoRun, ManifestGraphIsAcyclicAndComplete) {
  const auto work = dir_->path() / "work";
  std::set<std::string> produced;
  for (auto s : pl::all_stages()) {
    auto path = work / "manifests" / (std::string(pl::to_string(s)) + ".json");
    ASSERT_TRUE(fs::exists(path)) << path;
    auto m = pl::StageManifest::from_json(sp::Json::parse(oracle::read_all(path)));
    EXPECT_EQ(m.config_fingerprint, config().fingerprint());
    for (const auto& [in, hash] : m.inputs) {
      const bool external = !fs::exists(work / in) || in.starts_with("..");
      EXPECT_TRUE(produced.count(in) || external) << pl::to_string(s) << " reads " << in;
      EXPECT_EQ(hash.size(), 64u);
    }
    for (const auto& [out, hash] : m.outputs) {
      EXPECT_FALSE(produced.count(out)) << out << " produced twice";
      produced.insert(out);
    }
  }
}

TEST_F(DemoRun, RerunSkipsEveryStage) {
  pl::Pipeline again(config());
  auto outcomes = again.run_all();
  for (const auto& o : outcomes) EXPECT_TRUE(o.skipped) << pl::to_string(o.stage);
}

TEST_F(DemoRun, ForcedStageReproducesBytes) {
  const auto pairs = dir_->path() / "work" / "formal" / "pairs.jsonl";
  const auto before = oracle::read_all(pairs);
  pl::Options force;
  force.force = true;
  pl::Pipeline p(config(), force);
  auto o = p.run(pl::Stage::build_dataset);
  EXPECT_FALSE(o.skipped);
  EXPECT_EQ(oracle::read_all(pairs), before);
}

// Declared last: it corrupts an artifact of the shared run.
TEST_F(DemoRun, ZCorruptedIntermediateIsNamed) {
  const auto bank = dir_->path() / "work" / "casual" / "bank.jsonl";
  {
    std::ofstream f(bank, std::ios::app);
    f << "{}\n";
  }
  pl::Pipeline p(config());
  try {
    p.run(pl::Stage::emit_ft);
    FAIL() << "expected checksum_mismatch";
  } catch (const sp::Error& e) {
    EXPECT_EQ(e.code(), "checksum_mismatch");
    EXPECT_NE(std::string(e.what()).find("bank.jsonl"), std::string::npos) << e.what();
  }
}
