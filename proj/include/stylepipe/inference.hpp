// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stylepipe/generation.hpp"
#include "stylepipe/mt.hpp"
#include "stylepipe/prompting.hpp"
#include "stylepipe/retrieval.hpp"
#include "stylepipe/termbank.hpp"

namespace stylepipe::inference {

enum class Route { rt_first, direct };
std::string_view to_string(Route r);
Route route_from_string(std::string_view s);

enum class ShotMode { none, random, similar };

struct ShotConfig {
  ShotMode mode = ShotMode::similar;
  std::size_t k = 5;

  std::string to_string() const;  // "none", "random:3", "similar:5"
};

// Accepts "none", "0", "random:K", "similar:K"; a zero K means none.
ShotConfig parse_shots(std::string_view s);

struct TransferConfig {
  Route route = Route::rt_first;
  ShotConfig shots;
  prompting::PromptSpec prompt;  // k is taken from `shots`
  std::string pivot = "zh";
  std::uint64_t seed = 0;
  bool fail_hard = false;
  std::size_t workers = 4;

  std::string fingerprint() const;
};

struct TransferResult {
  std::string input;
  std::optional<std::string> neutral_input;  // rt_first only
  std::optional<std::string> sketch;         // sketch-first only
  retrieval::ShotSet shots_round1;
  retrieval::ShotSet shots_round2;
  std::string output;
  Route route = Route::direct;
  std::vector<std::string> prompt_audit;
  std::vector<std::pair<std::string, std::string>> term_mappings;
  bool degraded = false;  // RT failed and the direct route was used
  bool ok = false;
  std::string error;

  Json to_json() const;
};

struct BatchSummary {
  std::size_t total = 0;
  std::size_t ok = 0;
  std::size_t failed = 0;
  std::size_t degraded = 0;
};

class Engine {
 public:
  // Throws Error("precondition") when the config needs a component that is
  // missing: a gateway with the pivot for rt_first, a retriever for shots,
  // a term bank for include_terms.
  Engine(TransferConfig config, generation::Generator& generator, mt::Gateway* gateway,
         const retrieval::Retriever* retriever, const std::vector<termbank::TermPair>* bank);

  // Failures are reported in the result, never thrown, except when
  // fail_hard is set and the roundtrip fails.
  TransferResult transfer(const std::string& query) const;

  // Order-preserving, at most config.workers queries in flight.
  std::vector<TransferResult> batch_transfer(std::span<const std::string> queries,
                                             BatchSummary* summary = nullptr) const;

  const TransferConfig& config() const { return config_; }

 private:
  std::string generate_round(const std::string& prompt_query, const retrieval::ShotSet& shots,
                             const std::optional<std::string>& guidance,
                             TransferResult& audit) const;

  TransferConfig config_;
  generation::Generator& generator_;
  mt::Gateway* gateway_;
  const retrieval::Retriever* retriever_;
  const std::vector<termbank::TermPair>* bank_;
};

}  // namespace stylepipe::inference
