// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

// Corpus BLEU with a pinned tokenizer:
//   1. pad with spaces, then isolate every character in
//      { } | ~ [ \ ] ^ _ ` space ! " # $ % & ( ) * + : ; < = > ? @ /
//   2. split '.' and ',' unless both neighbours are digits
//   3. split '-' after a digit
//   4. split on whitespace
// Counts are clipped per segment and summed as integers across the corpus.
// Orders with no hypothesis n-grams anywhere are left out of the geometric
// mean; any remaining order with zero matches yields 0 unless smoothed.

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stylepipe/kernels.hpp"

namespace stylepipe::eval {

enum class Smoothing { none, add_k };

struct BleuConfig {
  int max_order = 4;
  bool case_sensitive = true;
  Smoothing smoothing = Smoothing::none;
  double k = 1.0;  // add_k only; applied to orders above 1

  void validate() const;
  std::string fingerprint() const;
};

BleuConfig sentence_config();

std::vector<std::string> tokenize_13a(std::string_view text);

double bleu_from_stats(const kernels::NgramStats& stats, const BleuConfig& cfg);

// Throws Error("precondition") for unequal lengths or an empty corpus.
double corpus_bleu(std::span<const std::string> hypotheses,
                   std::span<const std::string> references, const BleuConfig& cfg = {});

double sentence_bleu(std::string_view hypothesis, std::string_view reference,
                     const BleuConfig& cfg = sentence_config());

}  // namespace stylepipe::eval
