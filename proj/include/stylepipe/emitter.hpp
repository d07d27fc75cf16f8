// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stylepipe/dataset.hpp"
#include "stylepipe/inference.hpp"
#include "stylepipe/prompting.hpp"
#include "stylepipe/retrieval.hpp"
#include "stylepipe/termbank.hpp"

namespace stylepipe::emitter {

inline constexpr std::size_t kShardSize = 50000;
inline constexpr std::size_t kLongPromptChars = 8000;

struct EmitOptions {
  prompting::PromptSpec prompt;  // k is taken from `shots`
  inference::ShotConfig shots{inference::ShotMode::none, 0};
  std::string domain;
  std::uint64_t seed = 0;
  std::size_t shard_size = kShardSize;
};

struct EmitResult {
  std::size_t records = 0;
  std::vector<std::filesystem::path> shards;
  std::string checksum;  // sha256 of the shard bytes concatenated in order
  std::size_t long_prompts = 0;
};

// One record per pair, in input order. Shots never include the pair itself.
// Existing dataset-*.jsonl shards in `out_dir` are replaced.
EmitResult emit_dataset(const std::vector<dataset::PseudoPair>& pairs, const EmitOptions& options,
                        const retrieval::Retriever* retriever,
                        const std::vector<termbank::TermPair>* bank,
                        const std::filesystem::path& out_dir);

Json finetune_record(const dataset::PseudoPair& pair, const prompting::RenderedPrompt& rendered,
                     const std::string& domain);

struct TrainManifest {
  double learning_rate = 2e-4;
  std::int64_t lora_rank = 512;
  std::int64_t lora_alpha = 256;
  std::string dtype = "float16";
  double dropout = 0.05;
  std::int64_t save_eval_steps = 2000;
  std::string base_model = "meta-llama/Llama-3.1-8B-Instruct";
  std::string dataset_path;
  std::string dataset_checksum;
  std::size_t records = 0;
  std::uint64_t seed = 0;
  Json overrides = Json::object();

  void validate() const;
  Json to_json() const;
  static TrainManifest from_json(const Json& j);
};

// Applies {"learning_rate": ..., ...}; unknown keys are rejected, every
// applied key is logged and recorded in `overrides`.
TrainManifest apply_overrides(TrainManifest manifest, const Json& overrides);

void emit_manifest(const TrainManifest& manifest, const std::filesystem::path& path);

}  // namespace stylepipe::emitter
