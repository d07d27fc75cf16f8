// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "stylepipe/generation.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "stylepipe/error.hpp"
#include "stylepipe/log.hpp"
#include "stylepipe/prompting.hpp"
#include "stylepipe/text.hpp"

namespace stylepipe::generation {

std::string_view to_string(GenKind k) {
  switch (k) {
    case GenKind::http_completion: return "http_completion";
    case GenKind::mock_echo: return "mock_echo";
    case GenKind::mock_rulebook: return "mock_rulebook";
  }
  return "?";
}

GenKind gen_kind_from_string(std::string_view s) {
  if (s == "http_completion" || s == "http") return GenKind::http_completion;
  if (s == "mock_echo") return GenKind::mock_echo;
  if (s == "mock_rulebook") return GenKind::mock_rulebook;
  throw Error("config", "unknown generation backend kind: " + std::string(s));
}

void GenBackendSpec::validate() const {
  if (backend_id.empty()) throw Error("config", "generation backend id must be nonempty");
  if (!(temperature >= 0.0)) throw Error("config", "temperature must be >= 0");
  if (max_new_tokens <= 0) throw Error("config", "max_new_tokens must be positive");
  if (kind == GenKind::http_completion) {
    http::parse_url(endpoint);
  }
  if (kind == GenKind::mock_rulebook) {
    if (rulebook.empty()) throw Error("config", "mock_rulebook needs a substitution table");
    for (const auto& [from, to] : rulebook) {
      if (from.empty()) throw Error("config", "rulebook keys must be nonempty");
    }
  }
}

std::string apply_rulebook(std::string_view text, const Rulebook& rulebook) {
  std::vector<const std::pair<std::string, std::string>*> order;
  for (const auto& r : rulebook) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) {
    return a->first.size() > b->first.size();
  });
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const bool at_start = i == 0 || !text::is_word_byte(text[i - 1]);
    bool replaced = false;
    if (at_start) {
      for (const auto* r : order) {
        const auto& key = r->first;
        if (text.compare(i, key.size(), key) != 0) continue;
        const std::size_t end = i + key.size();
        if (end < text.size() && text::is_word_byte(text[end])) continue;
        out.append(r->second);
        i = end;
        replaced = true;
        break;
      }
    }
    if (!replaced) out.push_back(text[i++]);
  }
  return out;
}

std::string EchoBackend::complete(const std::string& prompt) {
  if (auto q = prompting::extract_query(prompt)) return *q;
  if (prompting::parse_term_extract(prompt)) return "";
  if (auto a = prompting::parse_term_align(prompt)) return a->first;
  return prompt;
}

RulebookBackend::RulebookBackend(GenBackendSpec spec) : GenerationBackend(std::move(spec)) {
  this->spec().validate();
}

std::string RulebookBackend::complete(const std::string& prompt) {
  const auto& rb = spec().rulebook;
  if (auto q = prompting::extract_query(prompt)) return apply_rulebook(*q, rb);
  if (auto sentence = prompting::parse_term_extract(prompt)) {
    // Surface forms as they occur in the sentence, first occurrence order.
    std::vector<std::pair<std::size_t, std::string>> found;
    std::set<std::string> seen;
    for (const auto& [from, to] : rb) {
      auto hits = text::find_whole_word(*sentence, from);
      if (hits.empty() || !seen.insert(text::to_lower_ascii(from)).second) continue;
      found.emplace_back(hits.front(), sentence->substr(hits.front(), from.size()));
    }
    std::sort(found.begin(), found.end());
    std::vector<std::string> names;
    for (auto& f : found) names.push_back(std::move(f.second));
    return names.empty() ? "None" : text::join(names, ", ");
  }
  if (auto a = prompting::parse_term_align(prompt)) {
    for (const auto& [from, to] : rb) {
      if (text::to_lower_ascii(from) == text::to_lower_ascii(a->first) &&
          text::contains_whole_word(a->second, to)) {
        return to;
      }
    }
    return a->first;
  }
  return apply_rulebook(prompt, rb);
}

HttpCompletionBackend::HttpCompletionBackend(GenBackendSpec spec, http::ClientOptions options)
    : GenerationBackend(std::move(spec)), options_(std::move(options)) {
  this->spec().validate();
}

std::string HttpCompletionBackend::complete(const std::string& prompt) {
  const Json body{{"model", spec().model_tag},
                  {"prompt", prompt},
                  {"max_tokens", spec().max_new_tokens},
                  {"temperature", spec().temperature}};
  auto resp = http::post_json(spec().endpoint, body, options_);
  if (resp.status != 200) {
    throw std::runtime_error("generation endpoint returned status " +
                             std::to_string(resp.status) + " " + resp.error);
  }
  auto j = Json::parse(resp.body, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("text") || !j["text"].is_string()) {
    throw std::runtime_error("generation endpoint returned a malformed body");
  }
  return j["text"].get<std::string>();
}

std::unique_ptr<GenerationBackend> make_generation_backend(const GenBackendSpec& spec,
                                                           const http::ClientOptions& options) {
  spec.validate();
  switch (spec.kind) {
    case GenKind::http_completion: return std::make_unique<HttpCompletionBackend>(spec, options);
    case GenKind::mock_echo: return std::make_unique<EchoBackend>(spec);
    case GenKind::mock_rulebook: return std::make_unique<RulebookBackend>(spec);
  }
  throw Error("config", "unknown generation backend kind");
}

Generator::Generator(std::unique_ptr<GenerationBackend> backend, http::RetryPolicy retry)
    : backend_(std::move(backend)), retry_(retry) {
  if (!backend_) throw Error("precondition", "generator needs a backend");
}

std::string Generator::generate(const std::string& prompt) {
  std::string out;
  std::string last_error;
  const bool ok = http::with_retry(retry_, [&] {
    ++calls_;
    try {
      out = backend_->complete(prompt);
      return true;
    } catch (const std::exception& e) {
      last_error = e.what();
      spdlog::warn("generation backend {}: {}", backend_->spec().backend_id, last_error);
      return false;
    }
  });
  if (!ok) throw Error("backend", "generation failed: " + last_error);
  return out;
}

std::string postprocess(std::string_view prompt, std::string_view completion) {
  std::string_view rest = completion;
  if (!prompt.empty() && rest.substr(0, prompt.size()) == prompt) rest.remove_prefix(prompt.size());
  rest = text::trim(rest);
  std::size_t pos = 0;
  while (pos < rest.size()) {
    std::size_t nl = rest.find('\n', pos);
    if (nl == std::string_view::npos) break;
    std::size_t next = rest.find('\n', nl + 1);
    if (next == std::string_view::npos) break;
    if (text::trim(rest.substr(nl + 1, next - nl - 1)).empty()) {
      rest = rest.substr(0, nl);
      break;
    }
    pos = nl + 1;
  }
  return std::string(text::trim(rest));
}

Rulebook read_rulebook_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open rulebook: " + path);
  Rulebook out;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error("parse", path + ":" + std::to_string(lineno) + ": expected two tab-separated fields");
    }
    std::string from(text::trim(std::string_view(line).substr(0, tab)));
    std::string to(text::trim(std::string_view(line).substr(tab + 1)));
    if (from.empty()) throw Error("parse", path + ":" + std::to_string(lineno) + ": empty key");
    if (!seen.insert(from).second) {
      throw Error("parse", path + ":" + std::to_string(lineno) + ": duplicate key " + from);
    }
    out.emplace_back(std::move(from), std::move(to));
  }
  return out;
}

}  // namespace stylepipe::generation
