// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "stylepipe/emitter.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>

#include "stylepipe/error.hpp"
#include "stylepipe/hash.hpp"
#include "stylepipe/jsonl.hpp"
#include "stylepipe/log.hpp"
#include "stylepipe/rng.hpp"
#include "stylepipe/text.hpp"

namespace stylepipe::emitter {
namespace {

std::string shard_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "dataset-%05zu.jsonl", i);
  return buf;
}

bool is_shard(const std::filesystem::path& p) {
  const auto name = p.filename().string();
  return name.rfind("dataset-", 0) == 0 && p.extension() == ".jsonl";
}

}  // namespace

Json finetune_record(const dataset::PseudoPair& pair, const prompting::RenderedPrompt& rendered,
                     const std::string& domain) {
  if (rendered.completion.empty()) throw Error("precondition", "empty completion for " + pair.id);
  return Json{{"prompt", rendered.prompt},
              {"completion", rendered.completion},
              {"meta",
               {{"pair_id", pair.id},
                {"template", std::string(prompting::to_string(rendered.tmpl))},
                {"shot_ids", rendered.shot_ids},
                {"term_count", rendered.term_mappings.size()},
                {"domain", domain}}}};
}

EmitResult emit_dataset(const std::vector<dataset::PseudoPair>& pairs, const EmitOptions& options,
                        const retrieval::Retriever* retriever,
                        const std::vector<termbank::TermPair>* bank,
                        const std::filesystem::path& out_dir) {
  auto spec = options.prompt;
  spec.k = options.shots.mode == inference::ShotMode::none ? 0 : options.shots.k;
  spec.validate();
  if (spec.k > 0 && !retriever) throw Error("precondition", "emitting shots needs a retriever");
  if (spec.include_terms && !bank) throw Error("precondition", "term guidance needs a term bank");
  if (options.shard_size == 0) throw Error("config", "shard size must be positive");

  std::filesystem::create_directories(out_dir);
  for (const auto& entry : std::filesystem::directory_iterator(out_dir)) {
    if (entry.is_regular_file() && is_shard(entry.path())) std::filesystem::remove(entry.path());
  }

  const auto cue = prompting::completion_cue(spec.tmpl);
  EmitResult result;
  std::unique_ptr<JsonlWriter> writer;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& pair = pairs[i];
    retrieval::ShotSet shots;
    if (options.shots.mode == inference::ShotMode::similar) {
      shots = retriever->train_shots(pair, spec.k);
    } else if (options.shots.mode == inference::ShotMode::random) {
      shots = retriever->random_shots(mix_seed(options.seed, hash64(pair.id)), spec.k, pair.id);
    }
    std::optional<std::string> guidance;
    std::vector<termbank::TermMatch> matches;
    if (spec.include_terms) {
      matches = termbank::match_triggers(pair.neutral, *bank);
      guidance = termbank::render_guidance(matches);
    }
    auto rendered = prompting::render_training_record(pair, spec, shots, guidance);
    for (const auto& m : matches) rendered.term_mappings.emplace_back(m.pair.source_term, m.pair.target_term);
    if (cue && !rendered.prompt.ends_with(*cue)) {
      throw Error("internal", "prompt for " + pair.id + " does not end with the completion cue");
    }
    if (rendered.prompt.size() > kLongPromptChars) {
      ++result.long_prompts;
      spdlog::warn("emit: prompt for {} has {} characters", pair.id, rendered.prompt.size());
    }
    if (i % options.shard_size == 0) {
      if (writer) writer->close();
      result.shards.push_back(out_dir / shard_name(result.shards.size()));
      writer = std::make_unique<JsonlWriter>(result.shards.back());
    }
    writer->write(finetune_record(pair, rendered, options.domain));
    ++result.records;
  }
  if (writer) writer->close();
  if (result.shards.empty()) {
    result.shards.push_back(out_dir / shard_name(0));
    write_file(result.shards.back(), "");
  }
  result.checksum = sha256_files(result.shards);
  spdlog::info("emit[{}]: {} records in {} shard(s), sha256 {}", options.domain, result.records,
               result.shards.size(), result.checksum.substr(0, 16));
  return result;
}

void TrainManifest::validate() const {
  if (!(learning_rate > 0) || lora_rank <= 0 || lora_alpha <= 0 || !(dropout > 0) ||
      save_eval_steps <= 0) {
    throw Error("config", "training manifest numbers must be positive");
  }
  if (dtype.empty() || base_model.empty()) throw Error("config", "manifest needs dtype and base_model");
}

Json TrainManifest::to_json() const {
  return Json{{"learning_rate", learning_rate},
              {"lora_rank", lora_rank},
              {"lora_alpha", lora_alpha},
              {"dtype", dtype},
              {"dropout", dropout},
              {"save_eval_steps", save_eval_steps},
              {"base_model", base_model},
              {"dataset_path", dataset_path},
              {"dataset_checksum", dataset_checksum},
              {"records", records},
              {"seed", seed},
              {"overrides", overrides}};
}

TrainManifest TrainManifest::from_json(const Json& j) {
  TrainManifest m;
  m.learning_rate = j.at("learning_rate").get<double>();
  m.lora_rank = j.at("lora_rank").get<std::int64_t>();
  m.lora_alpha = j.at("lora_alpha").get<std::int64_t>();
  m.dtype = j.at("dtype").get<std::string>();
  m.dropout = j.at("dropout").get<double>();
  m.save_eval_steps = j.at("save_eval_steps").get<std::int64_t>();
  m.base_model = j.at("base_model").get<std::string>();
  m.dataset_path = j.value("dataset_path", "");
  m.dataset_checksum = j.value("dataset_checksum", "");
  m.records = j.value("records", std::size_t{0});
  m.seed = j.value("seed", std::uint64_t{0});
  m.overrides = j.value("overrides", Json::object());
  m.validate();
  return m;
}

TrainManifest apply_overrides(TrainManifest m, const Json& overrides) {
  if (overrides.is_null()) return m;
  if (!overrides.is_object()) throw Error("config", "manifest overrides must be a table");
  for (const auto& [key, value] : overrides.items()) {
    if (key == "learning_rate") m.learning_rate = value.get<double>();
    else if (key == "lora_rank") m.lora_rank = value.get<std::int64_t>();
    else if (key == "lora_alpha") m.lora_alpha = value.get<std::int64_t>();
    else if (key == "dtype") m.dtype = value.get<std::string>();
    else if (key == "dropout") m.dropout = value.get<double>();
    else if (key == "save_eval_steps") m.save_eval_steps = value.get<std::int64_t>();
    else if (key == "base_model") m.base_model = value.get<std::string>();
    else throw Error("config", "unknown manifest override: " + key);
    spdlog::warn("manifest: {} overridden to {}", key, value.dump());
    m.overrides[key] = value;
  }
  m.validate();
  return m;
}

void emit_manifest(const TrainManifest& manifest, const std::filesystem::path& path) {
  manifest.validate();
  write_file(path, manifest.to_json().dump(2) + "\n");
}

}  // namespace stylepipe::emitter
