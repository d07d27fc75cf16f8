// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stylepipe/http.hpp"

namespace stylepipe::generation {

enum class GenKind { http_completion, mock_echo, mock_rulebook };
std::string_view to_string(GenKind k);
GenKind gen_kind_from_string(std::string_view s);

using Rulebook = std::vector<std::pair<std::string, std::string>>;

struct GenBackendSpec {
  std::string backend_id;
  GenKind kind = GenKind::mock_echo;
  std::string endpoint;  // http_completion only
  std::string model_tag = "mock";
  int max_new_tokens = 256;
  double temperature = 0.0;
  Rulebook rulebook;  // mock_rulebook only; nonempty

  void validate() const;
};

// Case-sensitive whole-word substitution, longest key first at each word
// start. Replacements are never rescanned.
std::string apply_rulebook(std::string_view text, const Rulebook& rulebook);

class GenerationBackend {
 public:
  explicit GenerationBackend(GenBackendSpec spec) : spec_(std::move(spec)) {}
  virtual ~GenerationBackend() = default;

  // One request; throws BackendFailure-like std::runtime_error on failure.
  virtual std::string complete(const std::string& prompt) = 0;
  const GenBackendSpec& spec() const { return spec_; }

 private:
  GenBackendSpec spec_;
};

// Answers style prompts with the query itself, extraction prompts with an
// empty list and alignment prompts with the word asked about.
class EchoBackend final : public GenerationBackend {
 public:
  using GenerationBackend::GenerationBackend;
  std::string complete(const std::string& prompt) override;
};

// Answers style prompts with apply_rulebook(query), extraction prompts with
// the rulebook keys found in the sentence and alignment prompts with the
// rulebook value when it occurs in the target sentence.
class RulebookBackend final : public GenerationBackend {
 public:
  explicit RulebookBackend(GenBackendSpec spec);
  std::string complete(const std::string& prompt) override;
};

class HttpCompletionBackend final : public GenerationBackend {
 public:
  HttpCompletionBackend(GenBackendSpec spec, http::ClientOptions options);
  std::string complete(const std::string& prompt) override;

 private:
  http::ClientOptions options_;
};

std::unique_ptr<GenerationBackend> make_generation_backend(
    const GenBackendSpec& spec, const http::ClientOptions& options = {});

// Thread-safe front end with retries and a request counter.
class Generator {
 public:
  explicit Generator(std::unique_ptr<GenerationBackend> backend,
                     http::RetryPolicy retry = {});

  // Throws Error("backend") once retries are exhausted.
  std::string generate(const std::string& prompt);

  std::uint64_t calls() const { return calls_.load(); }
  void reset_counters() { calls_ = 0; }
  const GenBackendSpec& spec() const { return backend_->spec(); }

 private:
  std::unique_ptr<GenerationBackend> backend_;
  http::RetryPolicy retry_;
  std::atomic<std::uint64_t> calls_{0};
};

// Strips a prompt echo, keeps the text before the first blank line, trims.
std::string postprocess(std::string_view prompt, std::string_view completion);

Rulebook read_rulebook_tsv(const std::string& path);

}  // namespace stylepipe::generation
