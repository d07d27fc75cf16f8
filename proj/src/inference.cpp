// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "stylepipe/inference.hpp"

#include <charconv>

#include "stylepipe/error.hpp"
#include "stylepipe/hash.hpp"
#include "stylepipe/log.hpp"
#include "stylepipe/parallel.hpp"
#include "stylepipe/rng.hpp"

namespace stylepipe::inference {

std::string_view to_string(Route r) { return r == Route::rt_first ? "rt-first" : "direct"; }

Route route_from_string(std::string_view s) {
  if (s == "rt-first" || s == "rt_first" || s == "i") return Route::rt_first;
  if (s == "direct" || s == "ii") return Route::direct;
  throw Error("config", "unknown route: " + std::string(s));
}

std::string ShotConfig::to_string() const {
  switch (mode) {
    case ShotMode::none: return "none";
    case ShotMode::random: return "random:" + std::to_string(k);
    case ShotMode::similar: return "similar:" + std::to_string(k);
  }
  return "?";
}

ShotConfig parse_shots(std::string_view s) {
  if (s == "none" || s == "0") return {ShotMode::none, 0};
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) throw Error("config", "shots must look like similar:5");
  const auto mode = s.substr(0, colon);
  const auto num = s.substr(colon + 1);
  std::size_t k = 0;
  auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), k);
  if (ec != std::errc() || p != num.data() + num.size()) {
    throw Error("config", "bad shot count in '" + std::string(s) + "'");
  }
  if (k == 0) return {ShotMode::none, 0};
  if (mode == "random") return {ShotMode::random, k};
  if (mode == "similar") return {ShotMode::similar, k};
  throw Error("config", "unknown shot mode in '" + std::string(s) + "'");
}

std::string TransferConfig::fingerprint() const {
  return "route=" + std::string(to_string(route)) + "/shots=" + shots.to_string() +
         "/template=" + std::string(prompting::to_string(prompt.tmpl)) +
         "/terms=" + (prompt.include_terms ? "1" : "0") +
         "/order=" + std::string(prompting::to_string(prompt.shot_order)) +
         "/pivot=" + pivot + "/seed=" + std::to_string(seed);
}

Json TransferResult::to_json() const {
  Json j{{"input", input},
         {"route", std::string(inference::to_string(route))},
         {"output", output},
         {"ok", ok},
         {"degraded", degraded},
         {"shots_round1", shots_round1.to_json()},
         {"shots_round2", shots_round2.to_json()},
         {"prompt_audit", prompt_audit},
         {"term_mappings", Json::array()}};
  j["neutral_input"] = neutral_input ? Json(*neutral_input) : Json(nullptr);
  j["sketch"] = sketch ? Json(*sketch) : Json(nullptr);
  for (const auto& [a, b] : term_mappings) j["term_mappings"].push_back(Json::array({a, b}));
  if (!error.empty()) j["error"] = error;
  return j;
}

Engine::Engine(TransferConfig config, generation::Generator& generator, mt::Gateway* gateway,
               const retrieval::Retriever* retriever, const std::vector<termbank::TermPair>* bank)
    : config_(std::move(config)),
      generator_(generator),
      gateway_(gateway),
      retriever_(retriever),
      bank_(bank) {
  config_.prompt.k = config_.shots.mode == ShotMode::none ? 0 : config_.shots.k;
  config_.prompt.validate();
  if (config_.route == Route::rt_first) {
    if (!gateway_) throw Error("precondition", "rt-first route needs an MT gateway");
    const auto pivots = gateway_->pivots();
    if (std::find(pivots.begin(), pivots.end(), config_.pivot) == pivots.end()) {
      throw Error("precondition", "no MT route for pivot '" + config_.pivot + "'");
    }
  }
  if (config_.shots.mode != ShotMode::none && !retriever_) {
    throw Error("precondition", "shot retrieval needs a loaded index");
  }
  if (config_.prompt.include_terms && !bank_) {
    throw Error("precondition", "term guidance needs a loaded term bank");
  }
}

std::string Engine::generate_round(const std::string& prompt_query,
                                   const retrieval::ShotSet& shots,
                                   const std::optional<std::string>& guidance,
                                   TransferResult& audit) const {
  auto rendered = prompting::render(prompt_query, config_.prompt, shots, guidance);
  audit.prompt_audit.push_back(rendered.prompt);
  auto raw = generator_.generate(rendered.prompt);
  auto text = generation::postprocess(rendered.prompt, raw);
  if (text.empty()) throw Error("backend", "generation returned an empty completion");
  return text;
}

TransferResult Engine::transfer(const std::string& query) const {
  TransferResult r;
  r.input = query;
  r.route = config_.route;
  std::string prompt_query = query;
  if (config_.route == Route::rt_first) {
    auto rt = gateway_->roundtrip(query, config_.pivot);
    if (rt.ok) {
      r.neutral_input = rt.neutral;
      prompt_query = rt.neutral;
    } else if (config_.fail_hard) {
      throw Error("roundtrip", "roundtrip failed at " + rt.error_stage + ": " + rt.error);
    } else {
      spdlog::warn("transfer: roundtrip failed ({}); using the direct route", rt.error);
      r.route = Route::direct;
      r.degraded = true;
    }
  }
  try {
    std::optional<std::string> guidance;
    if (config_.prompt.include_terms) {
      auto matches = termbank::match_triggers(prompt_query, *bank_);
      for (const auto& m : matches) r.term_mappings.emplace_back(m.pair.source_term, m.pair.target_term);
      guidance = termbank::render_guidance(matches);
    }
    const std::size_t k = config_.prompt.k;
    const std::uint64_t seed = mix_seed(config_.seed, hash64(query));
    switch (config_.shots.mode) {
      case ShotMode::none:
        r.output = generate_round(prompt_query, {}, guidance, r);
        break;
      case ShotMode::random:
        r.shots_round1 = retriever_->random_shots(seed, k);
        r.output = generate_round(prompt_query, r.shots_round1, guidance, r);
        break;
      case ShotMode::similar: {
        r.shots_round1 = retriever_->random_shots(seed, k);
        r.sketch = generate_round(prompt_query, r.shots_round1, guidance, r);
        try {
          r.shots_round2 = retriever_->sketch_shots(*r.sketch, k);
        } catch (const Error& e) {
          if (e.code() != "zero_vector") throw;
          spdlog::debug("transfer: sketch has no features; reusing round-1 shots");
          r.shots_round2 = r.shots_round1;
        }
        r.output = generate_round(prompt_query, r.shots_round2, guidance, r);
        break;
      }
    }
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  return r;
}

std::vector<TransferResult> Engine::batch_transfer(std::span<const std::string> queries,
                                                   BatchSummary* summary) const {
  std::vector<TransferResult> out(queries.size());
  parallel_for_bounded(queries.size(), config_.workers,
                       [&](std::size_t i) { out[i] = transfer(queries[i]); });
  BatchSummary s;
  s.total = out.size();
  for (const auto& r : out) {
    s.ok += r.ok;
    s.failed += !r.ok;
    s.degraded += r.degraded;
  }
  spdlog::info("infer: {} queries, {} ok, {} failed, {} degraded", s.total, s.ok, s.failed,
               s.degraded);
  if (summary) *summary = s;
  return out;
}

}  // namespace stylepipe::inference
