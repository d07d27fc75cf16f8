// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

// Stage graph (per domain unless noted):
//   ingest        corpus files            -> corpus.jsonl ingest.json
//   roundtrip     corpus.jsonl            -> rt.jsonl
//   build-dataset corpus.jsonl rt.jsonl   -> pairs.jsonl split.json dataset.json
//   index         pairs.jsonl split.json  -> embedder.bin index.bin
//   termbank      pairs.jsonl split.json  -> bank.jsonl
//   emit-ft       pairs, split, index, bank -> data/dataset-*.jsonl train_manifest.json
//   infer         corpus, split, index, bank -> results/<system>.jsonl
//   evaluate      corpus, split, rt, results (all domains) -> classifier.bin eval.json
//   report        every eval.json         -> report.json report.csv report.md (run level)
// Each stage records the sha256 of its inputs and outputs in
// manifests/<stage>.json, with paths relative to the work directory.

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stylepipe/config.hpp"
#include "stylepipe/generation.hpp"
#include "stylepipe/inference.hpp"
#include "stylepipe/mt.hpp"
#include "stylepipe/retrieval.hpp"

namespace stylepipe::pipeline {

enum class Stage { ingest, roundtrip, build_dataset, index, termbank, emit_ft, infer, evaluate, report };
std::string_view to_string(Stage s);
Stage stage_from_string(std::string_view s);
const std::vector<Stage>& all_stages();

struct Options {
  bool force = false;
};

struct StageOutcome {
  Stage stage = Stage::ingest;
  bool skipped = false;
  bool failed = false;
  bool degraded = false;
  std::string message;
};

struct StageManifest {
  std::string stage;
  std::string config_fingerprint;
  std::map<std::string, std::string> inputs;   // relative path -> sha256
  std::map<std::string, std::string> outputs;  // relative path -> sha256
  bool degraded = false;

  Json to_json() const;
  static StageManifest from_json(const Json& j);
};

inline constexpr int kExitFailed = 1;
inline constexpr int kExitDegraded = 3;

class Pipeline {
 public:
  Pipeline(config::RunConfig cfg, Options options = {});
  ~Pipeline();

  // Throws Error("checksum_mismatch") naming the file when a recorded
  // artifact was modified; other failures propagate as Error.
  StageOutcome run(Stage stage);

  // Runs every stage in order and stops at the first failure.
  std::vector<StageOutcome> run_all();

  static int exit_code(const std::vector<StageOutcome>& outcomes);

  const config::RunConfig& config() const { return cfg_; }
  std::filesystem::path work_dir() const { return work_; }
  std::filesystem::path domain_dir(const std::string& domain) const { return work_ / domain; }

  mt::Gateway& gateway();
  generation::Generator& generator();

  // Loads the train-split retriever and term bank of a built domain.
  std::unique_ptr<retrieval::Retriever> load_retriever(const std::string& domain) const;
  std::vector<termbank::TermPair> load_bank(const std::string& domain) const;

  std::vector<config::SystemConfig> systems() const;
  static std::string slug(std::string_view name);

 private:
  struct Plan {
    std::vector<std::filesystem::path> inputs;   // absolute
    std::vector<std::string> external_inputs;    // config-relative, as written
  };
  struct Produced {
    std::vector<std::filesystem::path> outputs;  // absolute
    bool degraded = false;
    std::string message;
  };

  Plan plan(Stage stage) const;
  Produced execute(Stage stage);
  std::string rel(const std::filesystem::path& p) const;
  std::filesystem::path manifest_path(Stage stage) const;
  std::optional<StageManifest> read_manifest(Stage stage) const;
  void verify_upstream(const std::filesystem::path& input) const;
  std::map<std::string, std::string> hash_inputs(const Plan& plan) const;

  Produced do_ingest();
  Produced do_roundtrip();
  Produced do_build_dataset();
  Produced do_index();
  Produced do_termbank();
  Produced do_emit_ft();
  Produced do_infer();
  Produced do_evaluate();
  Produced do_report();

  config::RunConfig cfg_;
  Options options_;
  std::filesystem::path work_;
  std::unique_ptr<mt::Gateway> gateway_;
  std::unique_ptr<generation::Generator> generator_;
};

}  // namespace stylepipe::pipeline
