// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stylepipe/corpus.hpp"
#include "stylepipe/dataset.hpp"
#include "stylepipe/generation.hpp"
#include "stylepipe/inference.hpp"
#include "stylepipe/jsonl.hpp"
#include "stylepipe/mt.hpp"
#include "stylepipe/prompting.hpp"
#include "stylepipe/report.hpp"

namespace stylepipe::config {

// Expands ${VAR} and ${VAR:-default}. Unset variables without a default
// expand to the empty string.
std::string expand_env(std::string_view s);

// Parses TOML into JSON (tables -> objects); Error("config") on syntax errors.
Json toml_to_json(std::string_view text);

struct DomainConfig {
  corpus::StyleDomain domain;
  std::string style_name;  // defaults to the domain name
  std::vector<std::string> corpus;  // as written in the config file
};

struct MtBackendConfig {
  std::string id;
  std::string kind = "mock_identity";
  std::string endpoint;  // may hold ${VAR}
  std::string src = "en";
  std::string tgt;
  std::string model_tag = "v1";
  std::int64_t seed = 0;
  bool permute = true;
  bool inverse = false;
  std::string synonyms;  // TSV path, mock_scramble only
};

struct RouteConfig {
  std::string pivot;
  std::string forward;
  std::string backward;
};

struct MtConfig {
  std::vector<std::string> pivots;
  std::vector<MtBackendConfig> backends;
  std::vector<RouteConfig> routes;
  std::int64_t batch_size = 32;
  std::int64_t max_in_flight = 4;
  std::int64_t retry_attempts = 3;
  std::int64_t retry_base_ms = 500;
  std::int64_t timeout_ms = 30000;
  bool cache = true;
};

struct GenerationConfig {
  std::string id = "llm";
  std::string kind = "mock_echo";
  std::string endpoint;
  std::string model_tag = "mock";
  std::int64_t max_new_tokens = 256;
  double temperature = 0.0;
  std::string rulebook;  // TSV path, mock_rulebook only
};

struct EmbedderConfig {
  std::string kind = "hashed_tfidf";  // or "http"
  std::int64_t min_n = 3;
  std::int64_t max_n = 5;
  std::int64_t dim = 1 << 14;
  bool drop_stopwords = true;
  std::string endpoint;
  std::string model_tag;
};

struct ClassifierConfig {
  std::string kind = "builtin_linear";  // or "http_service"
  std::string endpoint;
  std::int64_t max_epochs = 200;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  // Extra out-of-domain corpora added to every domain's negatives.
  std::vector<std::string> negatives;
};

struct SystemConfig {
  std::string name;
  std::string route = "rt-first";
  std::string shots = "similar:5";
  bool include_terms = true;
};

struct RunConfig {
  std::int64_t seed = 0;
  std::int64_t workers = 4;
  std::string work_dir = "work";  // excluded from the fingerprint
  std::vector<DomainConfig> domains;
  corpus::CleanPolicy clean;
  dataset::PairPolicy pairs;
  double max_failure_rate = dataset::kDegradedFailureRate;
  MtConfig mt;
  GenerationConfig generation;
  EmbedderConfig embedder;
  ClassifierConfig classifier;
  std::string prompt_template = "I";
  std::string shot_order = "most-similar-last";
  std::string finetune_shots = "similar:3";
  bool finetune_terms = true;
  std::int64_t shard_size = 50000;
  Json manifest_overrides = Json::object();
  std::int64_t min_support = 2;
  std::string pivot = "zh";  // inference pivot
  bool fail_hard = false;
  std::vector<SystemConfig> systems;
  std::int64_t bleu_max_order = 4;
  bool bleu_case_sensitive = true;

  // Directory relative paths resolve against; set by load().
  std::filesystem::path base_dir = ".";

  void validate() const;
  Json to_json() const;
  static RunConfig from_json(const Json& j);

  std::string to_toml() const;
  static RunConfig parse_toml(std::string_view text, const std::filesystem::path& base_dir = ".");
  static RunConfig load(const std::filesystem::path& path);

  // sha256 of the canonical JSON without work_dir and workers.
  std::string fingerprint() const;

  std::filesystem::path resolve(const std::string& path) const;
  std::filesystem::path work_path() const { return resolve(work_dir); }

  // Built objects.
  std::vector<mt::MtBackendSpec> mt_specs() const;
  mt::GatewayOptions gateway_options() const;
  http::ClientOptions client_options() const;
  generation::GenBackendSpec generation_spec() const;
  prompting::PromptSpec prompt_spec(const DomainConfig& d, bool include_terms) const;
  eval::BleuConfig bleu_config() const;
  const DomainConfig& domain(const std::string& name) const;
};

std::vector<std::pair<std::string, std::string>> read_synonyms_tsv(const std::filesystem::path& path);

}  // namespace stylepipe::config
