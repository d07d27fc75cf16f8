// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "stylepipe/features.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "stylepipe/error.hpp"
#include "stylepipe/hash.hpp"
#include "stylepipe/text.hpp"

namespace stylepipe::features {
namespace {

constexpr std::string_view kStopwords[] = {
    "a",       "about",   "above",  "after",   "again",   "against", "all",
    "am",      "an",      "and",    "any",     "are",     "as",      "at",
    "be",      "because", "been",   "before",  "being",   "below",   "between",
    "both",    "but",     "by",     "can",     "did",     "do",      "does",
    "doing",   "down",    "during", "each",    "few",     "for",     "from",
    "further", "had",     "has",    "have",    "having",  "he",      "her",
    "here",    "hers",    "herself", "him",    "himself", "his",     "how",
    "i",       "if",      "in",     "into",    "is",      "it",      "its",
    "itself",  "just",    "me",     "more",    "most",    "my",      "myself",
    "no",      "nor",     "not",    "now",     "of",      "off",     "on",
    "once",    "only",    "or",     "other",   "our",     "ours",    "ourselves",
    "out",     "over",    "own",    "s",       "same",    "she",     "should",
    "so",      "some",    "such",   "t",       "than",    "that",    "the",
    "their",   "theirs",  "them",   "themselves", "then", "there",   "these",
    "they",    "this",    "those",  "through", "to",      "too",     "under",
    "until",   "up",      "very",   "was",     "we",      "were",    "what",
    "when",    "where",   "which",  "while",   "who",     "whom",    "why",
    "with",    "you",     "your",   "yours",   "yourself", "yourselves", "will",
    "would"};

}  // namespace

void NgramHashConfig::validate() const {
  if (min_n < 1 || max_n < min_n) throw Error("config", "invalid n-gram range");
  if (dim == 0) throw Error("config", "feature dimension must be positive");
}

bool is_stopword(std::string_view w) {
  return std::find(std::begin(kStopwords), std::end(kStopwords), w) != std::end(kStopwords);
}

std::vector<std::string> words(std::string_view s, bool drop_stopwords) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && !text::is_word_byte(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && text::is_word_byte(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) {
      std::string w = text::to_lower_ascii(s.substr(i, j - i));
      if (!drop_stopwords || !is_stopword(w)) out.push_back(std::move(w));
    }
    i = j;
  }
  return out;
}

std::uint32_t bucket(std::string_view ngram, std::uint32_t dim) {
  return static_cast<std::uint32_t>(fnv1a64(ngram) % dim);
}

kernels::SparseVector ngram_counts(std::string_view s, const NgramHashConfig& cfg) {
  std::map<std::uint32_t, float> counts;
  for (const auto& w : words(s, cfg.drop_stopwords)) {
    std::string padded = " " + w + " ";
    for (int n = cfg.min_n; n <= cfg.max_n; ++n) {
      if (padded.size() < static_cast<std::size_t>(n)) break;
      for (std::size_t i = 0; i + n <= padded.size(); ++i) {
        counts[bucket(std::string_view(padded).substr(i, n), cfg.dim)] += 1.0f;
      }
    }
  }
  kernels::SparseVector v;
  v.index.reserve(counts.size());
  v.value.reserve(counts.size());
  for (const auto& [b, c] : counts) {
    v.index.push_back(b);
    v.value.push_back(c);
  }
  return v;
}

std::string fingerprint(const NgramHashConfig& cfg) {
  return "char" + std::to_string(cfg.min_n) + "-" + std::to_string(cfg.max_n) +
         "/dim" + std::to_string(cfg.dim) + "/stop" +
         (cfg.drop_stopwords ? "1" : "0") + "/fnv1a64";
}

}  // namespace stylepipe::features
