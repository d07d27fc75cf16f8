// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stylepipe/http.hpp"

namespace stylepipe::mt {

enum class BackendKind { http, mock_identity, mock_scramble };
std::string_view to_string(BackendKind k);
BackendKind backend_kind_from_string(std::string_view s);

struct MtBackendSpec {
  std::string backend_id;
  BackendKind kind = BackendKind::mock_identity;
  std::string endpoint;  // http only
  std::string src_lang = "en";
  std::string tgt_lang;
  std::string model_tag = "v1";

  // mock_scramble: seeded token permutation plus a symmetric synonym swap.
  // `inverse` undoes the forward transform exactly.
  std::uint64_t seed = 0;
  bool permute = true;
  bool inverse = false;
  std::vector<std::pair<std::string, std::string>> synonyms;

  void validate() const;
};

// Thrown by a backend when a whole request fails; the gateway retries it
// and then marks every item of the chunk as failed.
class BackendFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MtBackend {
 public:
  explicit MtBackend(MtBackendSpec spec) : spec_(std::move(spec)) {}
  virtual ~MtBackend() = default;

  // One backend request. Must return exactly one output per input.
  virtual std::vector<std::string> translate_batch(
      std::span<const std::string> texts) = 0;

  const MtBackendSpec& spec() const { return spec_; }

 private:
  MtBackendSpec spec_;
};

class IdentityBackend final : public MtBackend {
 public:
  using MtBackend::MtBackend;
  std::vector<std::string> translate_batch(std::span<const std::string> texts) override;
};

class ScrambleBackend final : public MtBackend {
 public:
  explicit ScrambleBackend(MtBackendSpec spec);
  std::vector<std::string> translate_batch(std::span<const std::string> texts) override;

  std::string forward(const std::string& text) const;
  std::string backward(const std::string& text) const;

  // Permutation applied to a sentence of n tokens: output[i] = input[perm[i]].
  static std::vector<std::size_t> permutation(std::uint64_t seed, std::size_t n);

 private:
  std::string swap_token(const std::string& token) const;
  std::unordered_map<std::string, std::string> swap_;
};

class HttpBackend final : public MtBackend {
 public:
  HttpBackend(MtBackendSpec spec, http::ClientOptions options);
  std::vector<std::string> translate_batch(std::span<const std::string> texts) override;

 private:
  http::ClientOptions options_;
};

std::unique_ptr<MtBackend> make_backend(const MtBackendSpec& spec,
                                        const http::ClientOptions& options = {});

// Append-only key -> translation store. Readers run concurrently; writers are
// serialized and each put is flushed so an interrupted run resumes where it
// stopped.
class TranslationCache {
 public:
  TranslationCache() = default;
  explicit TranslationCache(const std::filesystem::path& path);

  static std::string key(std::string_view backend_id, std::string_view model_tag,
                         std::string_view text);

  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& value);
  std::size_t size() const;

 private:
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, std::string> entries_;
  std::ofstream log_;
};

struct ItemResult {
  std::optional<std::string> text;
  std::string error;
  bool cache_hit = false;

  bool ok() const { return text.has_value(); }
};

struct GatewayOptions {
  std::size_t batch_size = 32;
  std::size_t max_in_flight = 4;
  http::RetryPolicy retry;
};

struct PivotRoute {
  std::string pivot;
  std::string forward_id;   // en -> pivot
  std::string backward_id;  // pivot -> en
};

struct RoundtripResult {
  std::string original;
  std::string pivot_text;
  std::string neutral;
  std::string pivot_lang;
  std::string forward_backend;
  std::string backward_backend;
  std::pair<bool, bool> cache_hit{false, false};
  bool ok = false;
  std::string error_stage;  // "forward" or "backward" on failure
  std::string error;
};

struct BackendCounters {
  std::uint64_t calls = 0;  // backend requests issued, retries included
  std::uint64_t items = 0;  // texts sent
};

Json to_json(const RoundtripResult& r);
RoundtripResult roundtrip_from_json(const Json& j);

class Gateway {
 public:
  explicit Gateway(GatewayOptions options = {},
                   std::shared_ptr<TranslationCache> cache = nullptr);

  void add_backend(std::unique_ptr<MtBackend> backend);
  void add_route(PivotRoute route);
  std::vector<std::string> pivots() const;
  bool has_backend(const std::string& id) const;

  // Order-preserving; failures are reported per item and never abort the
  // batch. Throws Error("precondition") for an empty batch or unknown backend.
  std::vector<ItemResult> translate(std::span<const std::string> batch,
                                    const std::string& backend_id);

  RoundtripResult roundtrip(const std::string& text, const std::string& pivot);
  std::vector<RoundtripResult> roundtrip_batch(std::span<const std::string> texts,
                                               const std::string& pivot);

  BackendCounters counters(const std::string& backend_id) const;
  std::uint64_t total_calls() const;
  void reset_counters();

 private:
  struct Slot {
    std::unique_ptr<MtBackend> backend;
    std::atomic<std::uint64_t> calls{0};
    std::atomic<std::uint64_t> items{0};
  };

  Slot& slot(const std::string& id);
  const PivotRoute& route(const std::string& pivot) const;
  bool call_backend(Slot& s, std::span<const std::string> texts,
                    std::vector<std::string>& out, std::string& error);

  GatewayOptions options_;
  std::shared_ptr<TranslationCache> cache_;
  std::map<std::string, std::unique_ptr<Slot>> backends_;
  std::map<std::string, PivotRoute> routes_;
};

}  // namespace stylepipe::mt
