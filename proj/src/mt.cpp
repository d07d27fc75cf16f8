// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "stylepipe/mt.hpp"

#include <cctype>
#include <numeric>

#include "stylepipe/error.hpp"
#include "stylepipe/hash.hpp"
#include "stylepipe/log.hpp"
#include "stylepipe/parallel.hpp"
#include "stylepipe/rng.hpp"
#include "stylepipe/text.hpp"

namespace stylepipe::mt {

std::string_view to_string(BackendKind k) {
  switch (k) {
    case BackendKind::http: return "http";
    case BackendKind::mock_identity: return "mock_identity";
    case BackendKind::mock_scramble: return "mock_scramble";
  }
  return "unknown";
}

BackendKind backend_kind_from_string(std::string_view s) {
  if (s == "http") return BackendKind::http;
  if (s == "mock_identity") return BackendKind::mock_identity;
  if (s == "mock_scramble") return BackendKind::mock_scramble;
  throw Error("config", "unknown MT backend kind: " + std::string(s));
}

void MtBackendSpec::validate() const {
  if (backend_id.empty()) throw Error("config", "MT backend_id must be nonempty");
  if (kind == BackendKind::http && endpoint.empty()) {
    throw Error("config", "MT backend '" + backend_id + "' needs an endpoint");
  }
  if (src_lang == tgt_lang) {
    throw Error("config", "MT backend '" + backend_id + "': src_lang equals tgt_lang");
  }
}

std::vector<std::string> IdentityBackend::translate_batch(
    std::span<const std::string> texts) {
  return {texts.begin(), texts.end()};
}

ScrambleBackend::ScrambleBackend(MtBackendSpec spec) : MtBackend(std::move(spec)) {
  for (const auto& [a, b] : this->spec().synonyms) {
    if (a.empty() || b.empty() || a == b) {
      throw Error("config", "synonym pair must hold two distinct words");
    }
    // Capitalisation rides on the token; an uppercase entry would break the
    // exact inverse.
    if (std::isupper(static_cast<unsigned char>(a[0])) ||
        std::isupper(static_cast<unsigned char>(b[0]))) {
      throw Error("config", "synonym words must start lowercase: " + a + "/" + b);
    }
    if (swap_.count(a) || swap_.count(b)) {
      throw Error("config", "word listed in two synonym pairs: " + a + "/" + b);
    }
    swap_[a] = b;
    swap_[b] = a;
  }
}

std::vector<std::size_t> ScrambleBackend::permutation(std::uint64_t seed,
                                                      std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(mix_seed(seed, n));
  deterministic_shuffle(perm, rng);
  return perm;
}

std::string ScrambleBackend::swap_token(const std::string& token) const {
  if (swap_.empty()) return token;
  std::size_t b = 0, e = token.size();
  while (b < e && !text::is_word_byte(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && !text::is_word_byte(static_cast<unsigned char>(token[e - 1]))) --e;
  if (b == e) return token;
  std::string core = token.substr(b, e - b);
  std::string replaced;
  if (auto it = swap_.find(core); it != swap_.end()) {
    replaced = it->second;
  } else if (core[0] >= 'A' && core[0] <= 'Z') {
    std::string lowered = core;
    lowered[0] = static_cast<char>(lowered[0] - 'A' + 'a');
    auto lit = swap_.find(lowered);
    if (lit == swap_.end()) return token;
    replaced = lit->second;
    if (replaced[0] >= 'a' && replaced[0] <= 'z') {
      replaced[0] = static_cast<char>(replaced[0] - 'a' + 'A');
    }
  } else {
    return token;
  }
  return token.substr(0, b) + replaced + token.substr(e);
}

std::string ScrambleBackend::forward(const std::string& input) const {
  auto tokens = text::split_whitespace(input);
  for (auto& t : tokens) t = swap_token(t);
  if (spec().permute) {
    auto perm = permutation(spec().seed, tokens.size());
    std::vector<std::string> out(tokens.size());
    for (std::size_t i = 0; i < perm.size(); ++i) out[i] = tokens[perm[i]];
    tokens = std::move(out);
  }
  return text::join(tokens, " ");
}

std::string ScrambleBackend::backward(const std::string& input) const {
  auto tokens = text::split_whitespace(input);
  if (spec().permute) {
    auto perm = permutation(spec().seed, tokens.size());
    std::vector<std::string> out(tokens.size());
    for (std::size_t i = 0; i < perm.size(); ++i) out[perm[i]] = tokens[i];
    tokens = std::move(out);
  }
  for (auto& t : tokens) t = swap_token(t);
  return text::join(tokens, " ");
}

std::vector<std::string> ScrambleBackend::translate_batch(
    std::span<const std::string> texts) {
  std::vector<std::string> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(spec().inverse ? backward(t) : forward(t));
  return out;
}

HttpBackend::HttpBackend(MtBackendSpec spec, http::ClientOptions options)
    : MtBackend(std::move(spec)), options_(std::move(options)) {}

std::vector<std::string> HttpBackend::translate_batch(
    std::span<const std::string> texts) {
  Json body{{"src", spec().src_lang},
            {"tgt", spec().tgt_lang},
            {"texts", Json(std::vector<std::string>(texts.begin(), texts.end()))}};
  auto res = http::post_json(spec().endpoint, body, options_);
  if (res.status == 0) throw BackendFailure("transport: " + res.error);
  if (res.status != 200) {
    throw BackendFailure("HTTP status " + std::to_string(res.status));
  }
  Json parsed = Json::parse(res.body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object() ||
      !parsed.contains("translations") || !parsed["translations"].is_array()) {
    throw BackendFailure("malformed response: missing \"translations\" array");
  }
  std::vector<std::string> out;
  for (const auto& t : parsed["translations"]) {
    if (!t.is_string()) throw BackendFailure("malformed response: non-string translation");
    out.push_back(t.get<std::string>());
  }
  return out;
}

std::unique_ptr<MtBackend> make_backend(const MtBackendSpec& spec,
                                        const http::ClientOptions& options) {
  spec.validate();
  switch (spec.kind) {
    case BackendKind::http: return std::make_unique<HttpBackend>(spec, options);
    case BackendKind::mock_identity: return std::make_unique<IdentityBackend>(spec);
    case BackendKind::mock_scramble: return std::make_unique<ScrambleBackend>(spec);
  }
  throw Error("config", "unknown MT backend kind");
}

TranslationCache::TranslationCache(const std::filesystem::path& path) {
  if (std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    std::string line;
    std::size_t bad = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      Json j = Json::parse(line, nullptr, false);
      // A torn final line from an interrupted run is skipped.
      if (j.is_discarded() || !j.contains("k") || !j.contains("v")) {
        ++bad;
        continue;
      }
      entries_[j["k"].get<std::string>()] = j["v"].get<std::string>();
    }
    if (bad) spdlog::warn("translation cache {}: skipped {} damaged lines", path.string(), bad);
  } else if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  log_.open(path, std::ios::binary | std::ios::app);
  if (!log_) throw Error("io", "cannot open translation cache " + path.string());
}

std::string TranslationCache::key(std::string_view backend_id,
                                  std::string_view model_tag, std::string_view text) {
  return sha256_hex(key_of({backend_id, model_tag, text}));
}

std::optional<std::string> TranslationCache::get(const std::string& key) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void TranslationCache::put(const std::string& key, const std::string& value) {
  std::unique_lock lock(mu_);
  entries_[key] = value;
  if (log_.is_open()) {
    log_ << dump_line(Json{{"k", key}, {"v", value}}) << '\n';
    log_.flush();
  }
}

std::size_t TranslationCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

Gateway::Gateway(GatewayOptions options, std::shared_ptr<TranslationCache> cache)
    : options_(options),
      cache_(cache ? std::move(cache) : std::make_shared<TranslationCache>()) {
  if (options_.batch_size == 0) options_.batch_size = 1;
  if (options_.max_in_flight == 0) options_.max_in_flight = 1;
}

void Gateway::add_backend(std::unique_ptr<MtBackend> backend) {
  auto id = backend->spec().backend_id;
  auto s = std::make_unique<Slot>();
  s->backend = std::move(backend);
  backends_[id] = std::move(s);
}

void Gateway::add_route(PivotRoute route) {
  if (!backends_.count(route.forward_id) || !backends_.count(route.backward_id)) {
    throw Error("config", "pivot '" + route.pivot + "' references an unknown backend");
  }
  routes_[route.pivot] = std::move(route);
}

std::vector<std::string> Gateway::pivots() const {
  std::vector<std::string> out;
  for (const auto& [p, _] : routes_) out.push_back(p);
  return out;
}

bool Gateway::has_backend(const std::string& id) const { return backends_.count(id) > 0; }

Gateway::Slot& Gateway::slot(const std::string& id) {
  auto it = backends_.find(id);
  if (it == backends_.end()) throw Error("precondition", "unknown MT backend: " + id);
  return *it->second;
}

const PivotRoute& Gateway::route(const std::string& pivot) const {
  auto it = routes_.find(pivot);
  if (it == routes_.end()) {
    throw Error("precondition", "no roundtrip backends configured for pivot '" + pivot + "'");
  }
  return it->second;
}

bool Gateway::call_backend(Slot& s, std::span<const std::string> texts,
                           std::vector<std::string>& out, std::string& error) {
  return http::with_retry(options_.retry, [&] {
    s.calls++;
    s.items += texts.size();
    try {
      out = s.backend->translate_batch(texts);
    } catch (const std::exception& e) {
      error = e.what();
      return false;
    }
    if (out.size() != texts.size()) {
      error = "malformed response: " + std::to_string(out.size()) +
              " outputs for " + std::to_string(texts.size()) + " inputs";
      return false;
    }
    return true;
  });
}

std::vector<ItemResult> Gateway::translate(std::span<const std::string> batch,
                                           const std::string& backend_id) {
  if (batch.empty()) throw Error("precondition", "translate: empty batch");
  Slot& s = slot(backend_id);
  const auto& spec = s.backend->spec();
  std::vector<ItemResult> results(batch.size());

  // Unique uncached texts, in first-seen order.
  std::vector<std::string> pending;
  std::unordered_map<std::string, std::vector<std::size_t>> waiting;
  std::vector<std::string> keys(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (text::trim(batch[i]).empty()) {
      results[i].error = "empty_text";
      continue;
    }
    keys[i] = TranslationCache::key(spec.backend_id, spec.model_tag, batch[i]);
    if (auto hit = cache_->get(keys[i])) {
      results[i].text = std::move(*hit);
      results[i].cache_hit = true;
      continue;
    }
    auto& slots = waiting[batch[i]];
    if (slots.empty()) pending.push_back(batch[i]);
    slots.push_back(i);
  }

  const std::size_t chunk = options_.batch_size;
  const std::size_t n_chunks = (pending.size() + chunk - 1) / chunk;
  std::vector<std::vector<std::string>> outputs(n_chunks);
  std::vector<std::string> errors(n_chunks);
  std::vector<char> ok(n_chunks, 0);
  parallel_for_bounded(n_chunks, options_.max_in_flight, [&](std::size_t c) {
    std::size_t begin = c * chunk;
    std::size_t len = std::min(chunk, pending.size() - begin);
    std::span<const std::string> texts(pending.data() + begin, len);
    ok[c] = call_backend(s, texts, outputs[c], errors[c]);
    if (!ok[c]) return;
    for (std::size_t t = 0; t < len; ++t) {
      if (text::trim(outputs[c][t]).empty()) continue;
      cache_->put(TranslationCache::key(spec.backend_id, spec.model_tag, texts[t]),
                  outputs[c][t]);
    }
  });

  for (std::size_t c = 0; c < n_chunks; ++c) {
    std::size_t begin = c * chunk;
    std::size_t len = std::min(chunk, pending.size() - begin);
    if (!ok[c]) {
      spdlog::warn("MT backend {}: chunk of {} failed: {}", backend_id, len, errors[c]);
    }
    for (std::size_t t = 0; t < len; ++t) {
      for (std::size_t i : waiting[pending[begin + t]]) {
        if (!ok[c]) {
          results[i].error = errors[c];
        } else if (text::trim(outputs[c][t]).empty()) {
          results[i].error = "empty translation";
        } else {
          results[i].text = outputs[c][t];
        }
      }
    }
  }
  return results;
}

std::vector<RoundtripResult> Gateway::roundtrip_batch(std::span<const std::string> texts,
                                                      const std::string& pivot) {
  const PivotRoute& r = route(pivot);
  std::vector<RoundtripResult> out(texts.size());
  if (texts.empty()) return out;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    out[i].original = texts[i];
    out[i].pivot_lang = pivot;
    out[i].forward_backend = r.forward_id;
    out[i].backward_backend = r.backward_id;
  }
  auto fwd = translate(texts, r.forward_id);
  std::vector<std::string> mid;
  std::vector<std::size_t> mid_index;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (!fwd[i].ok()) {
      out[i].error_stage = "forward";
      out[i].error = fwd[i].error;
      continue;
    }
    out[i].pivot_text = *fwd[i].text;
    out[i].cache_hit.first = fwd[i].cache_hit;
    mid.push_back(*fwd[i].text);
    mid_index.push_back(i);
  }
  if (mid.empty()) return out;
  auto bwd = translate(mid, r.backward_id);
  for (std::size_t t = 0; t < mid.size(); ++t) {
    auto& res = out[mid_index[t]];
    res.cache_hit.second = bwd[t].cache_hit;
    if (!bwd[t].ok()) {
      res.error_stage = "backward";
      res.error = bwd[t].error;
      continue;
    }
    res.neutral = *bwd[t].text;
    res.ok = true;
  }
  return out;
}

RoundtripResult Gateway::roundtrip(const std::string& text, const std::string& pivot) {
  return roundtrip_batch(std::span<const std::string>(&text, 1), pivot).front();
}

Json to_json(const RoundtripResult& r) {
  Json j{{"original", r.original},
         {"pivot_text", r.pivot_text},
         {"neutral", r.neutral},
         {"pivot_lang", r.pivot_lang},
         {"forward_backend", r.forward_backend},
         {"backward_backend", r.backward_backend},
         {"cache_hit", {r.cache_hit.first, r.cache_hit.second}},
         {"ok", r.ok}};
  if (!r.ok) {
    j["error_stage"] = r.error_stage;
    j["error"] = r.error;
  }
  return j;
}

RoundtripResult roundtrip_from_json(const Json& j) {
  RoundtripResult r;
  r.original = j.at("original").get<std::string>();
  r.pivot_text = j.value("pivot_text", "");
  r.neutral = j.value("neutral", "");
  r.pivot_lang = j.value("pivot_lang", "");
  r.forward_backend = j.value("forward_backend", "");
  r.backward_backend = j.value("backward_backend", "");
  if (j.contains("cache_hit")) {
    r.cache_hit = {j["cache_hit"][0].get<bool>(), j["cache_hit"][1].get<bool>()};
  }
  r.ok = j.value("ok", false);
  r.error_stage = j.value("error_stage", "");
  r.error = j.value("error", "");
  return r;
}

BackendCounters Gateway::counters(const std::string& backend_id) const {
  auto it = backends_.find(backend_id);
  if (it == backends_.end()) return {};
  return {it->second->calls.load(), it->second->items.load()};
}

std::uint64_t Gateway::total_calls() const {
  std::uint64_t n = 0;
  for (const auto& [_, s] : backends_) n += s->calls.load();
  return n;
}

void Gateway::reset_counters() {
  for (auto& [_, s] : backends_) {
    s->calls = 0;
    s->items = 0;
  }
}

}  // namespace stylepipe::mt
