// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

// Synthetic fixtures shared by the unit tests and the acceptance runner.

#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "stylepipe/dataset.hpp"
#include "stylepipe/generation.hpp"
#include "stylepipe/mt.hpp"
#include "stylepipe/prompting.hpp"
#include "stylepipe/termbank.hpp"
#include "stylepipe/text.hpp"

namespace fixtures {

namespace fs = std::filesystem;

// Removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("stylepipe-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

// Copies the demo inputs (not its work directory) into `dst`.
inline void copy_demo(const fs::path& demo_dir, const fs::path& dst) {
  for (const auto& e : fs::directory_iterator(demo_dir)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension();
    if (ext == ".txt" || ext == ".tsv" || ext == ".toml") {
      fs::copy_file(e.path(), dst / e.path().filename(), fs::copy_options::overwrite_existing);
    }
  }
}

inline stylepipe::mt::MtBackendSpec mt_spec(std::string id, stylepipe::mt::BackendKind kind,
                                            std::string src, std::string tgt) {
  stylepipe::mt::MtBackendSpec s;
  s.backend_id = std::move(id);
  s.kind = kind;
  s.src_lang = std::move(src);
  s.tgt_lang = std::move(tgt);
  return s;
}

inline stylepipe::generation::GenBackendSpec gen_spec(std::string id,
                                                      stylepipe::generation::GenKind kind) {
  stylepipe::generation::GenBackendSpec s;
  s.backend_id = std::move(id);
  s.kind = kind;
  return s;
}

// ----- termbank -----

inline const std::vector<std::pair<std::string, std::string>>& planted_terms() {
  static const std::vector<std::pair<std::string, std::string>> t = {
      {"football", "soccer"},     {"truck", "lorry"},          {"apartment", "flat"},
      {"elevator", "lift"},       {"vacation", "holiday"},     {"cookie", "biscuit"},
      {"gasoline", "petrol"},     {"sidewalk", "pavement"},    {"trash can", "rubbish bin"},
      {"french fries", "chips"},  {"parking lot", "car park"}, {"subway", "underground"},
      {"zip code", "postcode"},   {"line", "queue"},           {"fall", "autumn"},
      {"mail", "post"},           {"pants", "trousers"},       {"sweater", "jumper"},
      {"faucet", "tap"},          {"diaper", "nappy"}};
  return t;
}

// Filler shares no whole word with any planted term.
inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> w = {
      "we",     "saw",    "near",  "the",    "old",    "market", "today", "and",
      "then",   "walked", "home",  "with",   "my",     "cousin", "after", "dinner",
      "a",      "quiet",  "town",  "during", "bright", "weather", "every", "morning"};
  return w;
}

struct TermCorpus {
  std::vector<stylepipe::dataset::PseudoPair> pairs;
  std::map<std::string, std::size_t> planted_support;  // source -> pairs containing it
};

// Each pair plants 1-3 terms; every term lands in at least three pairs.
inline TermCorpus term_corpus(std::size_t n_pairs = 60, std::uint64_t seed = 11) {
  std::mt19937_64 rng(seed);
  const auto& terms = planted_terms();
  const auto& fill = filler_words();
  TermCorpus c;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    std::set<std::size_t> chosen{i % terms.size()};
    const std::size_t extra = rng() % 3;
    while (chosen.size() < 1 + extra) chosen.insert(rng() % terms.size());
    std::vector<std::string> neutral_words, target_words;
    for (std::size_t t : chosen) {
      for (int f = 0; f < 2; ++f) {
        const auto& w = fill[rng() % fill.size()];
        neutral_words.push_back(w);
        target_words.push_back(w);
      }
      neutral_words.push_back(terms[t].first);
      target_words.push_back(terms[t].second);
      ++c.planted_support[terms[t].first];
    }
    stylepipe::dataset::PseudoPair p;
    p.id = "p" + std::to_string(1000 + i);
    p.neutral = stylepipe::text::join(neutral_words, " ") + ".";
    p.target = stylepipe::text::join(target_words, " ") + ".";
    p.pivot_lang = "zh";
    p.domain = "uk";
    c.pairs.push_back(std::move(p));
  }
  return c;
}

// Answers from the planted dictionary plus scripted noise: a hallucinated
// term, a filler word that aligns to itself, and one misalignment that only
// occurs once.
class ScriptedTermLlm final : public stylepipe::generation::GenerationBackend {
 public:
  ScriptedTermLlm()
      : GenerationBackend(gen_spec("scripted", stylepipe::generation::GenKind::mock_echo)) {}

  std::string complete(const std::string& prompt) override {
    namespace pr = stylepipe::prompting;
    if (auto sentence = pr::parse_term_extract(prompt)) {
      std::vector<std::pair<std::size_t, std::string>> found;
      for (const auto& [src, tgt] : planted_terms()) {
        auto hits = stylepipe::text::find_whole_word(*sentence, src);
        if (!hits.empty()) found.emplace_back(hits.front(), src);
      }
      std::sort(found.begin(), found.end());
      std::string out = "banana";
      for (const auto& f : found) out += ", " + f.second;
      if (sentence->find("market") != std::string::npos) out += ", market";
      return out;
    }
    if (auto a = pr::parse_term_align(prompt)) {
      const auto& [word, target] = *a;
      for (const auto& [src, tgt] : planted_terms()) {
        if (src != word) continue;
        // One misalignment, seen a single time.
        if (word == "football" && !misaligned_.exchange(true)) return "the";
        return tgt;
      }
      return word;
    }
    return "";
  }

 private:
  std::atomic<bool> misaligned_{false};
};

struct TriggerCase {
  std::string query;
  std::vector<std::pair<std::size_t, std::string>> expected;  // (start, source term)
};

// Queries built around planted terms at known offsets, with case variants
// and near-miss decoys that must not trigger.
inline std::vector<TriggerCase> trigger_cases(std::size_t n = 50, std::uint64_t seed = 5) {
  std::mt19937_64 rng(seed);
  const auto& terms = planted_terms();
  const auto& fill = filler_words();
  const std::vector<std::string> decoys = {"lines", "mailbox", "fallout", "footballer",
                                           "subways", "pantsuit"};
  std::vector<TriggerCase> out;
  for (std::size_t q = 0; q < n; ++q) {
    TriggerCase tc;
    std::string s;
    auto append = [&](const std::string& w) {
      if (!s.empty()) s += " ";
      s += w;
    };
    const std::size_t n_terms = q % 5;  // 0..4, under the match cap
    std::set<std::size_t> used;
    for (std::size_t t = 0; t < n_terms; ++t) {
      append(fill[rng() % fill.size()]);
      if (rng() % 3 == 0) append(decoys[rng() % decoys.size()]);
      std::size_t idx;
      do idx = rng() % terms.size();
      while (!used.insert(idx).second);
      std::string surface = terms[idx].first;
      switch (rng() % 3) {
        case 0: break;
        case 1: surface[0] = static_cast<char>(std::toupper(surface[0])); break;
        default:
          for (auto& ch : surface) ch = static_cast<char>(std::toupper(ch));
      }
      if (!s.empty()) s += " ";
      tc.expected.emplace_back(s.size(), terms[idx].first);
      s += surface;
    }
    append(fill[rng() % fill.size()]);
    if (n_terms == 0) append(decoys[q % decoys.size()]);
    tc.query = s + ".";
    out.push_back(std::move(tc));
  }
  return out;
}

// ----- classifier -----

inline std::vector<std::string> sentences_from(const std::vector<std::string>& vocab,
                                               std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = 6 + rng() % 7;
    std::vector<std::string> w;
    for (std::size_t j = 0; j < len; ++j) w.push_back(vocab[rng() % vocab.size()]);
    out.push_back(stylepipe::text::join(w, " ") + ".");
  }
  return out;
}

inline const std::vector<std::string>& formal_vocab() {
  static const std::vector<std::string> v = {
      "pursuant", "hereby",    "notwithstanding", "aforementioned", "shall",  "thereof",
      "whereas",  "herein",    "compliance",      "regulation",     "statute", "provision",
      "obligate", "furnish",   "remittance",      "jurisdiction",   "deem",   "accordance"};
  return v;
}

inline const std::vector<std::string>& informal_vocab() {
  static const std::vector<std::string> v = {
      "gonna", "yeah",  "lol",   "dude",  "kinda", "stuff", "wanna", "cool",  "nah",
      "gotta", "bucks", "chill", "buddy", "super", "folks", "grab",  "yep",   "awesome"};
  return v;
}

}  // namespace fixtures
