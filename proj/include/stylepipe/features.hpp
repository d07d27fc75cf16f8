// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

// Hashed word-bounded character n-grams, shared by the retrieval embedder and
// the style classifier.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stylepipe/kernels.hpp"

namespace stylepipe::features {

struct NgramHashConfig {
  int min_n = 3;
  int max_n = 5;
  std::uint32_t dim = 1u << 14;
  bool drop_stopwords = true;

  void validate() const;
};

bool is_stopword(std::string_view lower_word);

// Lowercased maximal runs of word bytes.
std::vector<std::string> words(std::string_view text, bool drop_stopwords);

std::uint32_t bucket(std::string_view ngram, std::uint32_t dim);

// Raw n-gram counts per bucket. Each word is padded with one space on both
// sides before n-grams are taken, so n-grams never cross word boundaries.
kernels::SparseVector ngram_counts(std::string_view text, const NgramHashConfig& cfg);

std::string fingerprint(const NgramHashConfig& cfg);

}  // namespace stylepipe::features
