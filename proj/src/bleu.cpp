// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "stylepipe/bleu.hpp"

#include <cmath>
#include <regex>

#include "stylepipe/error.hpp"
#include "stylepipe/text.hpp"

namespace stylepipe::eval {

void BleuConfig::validate() const {
  if (max_order < 1 || max_order > kernels::kMaxBleuOrder) {
    throw Error("config", "BLEU max_order must be in [1, 8]");
  }
  if (smoothing == Smoothing::add_k && !(k > 0.0)) {
    throw Error("config", "BLEU add-k smoothing needs k > 0");
  }
}

std::string BleuConfig::fingerprint() const {
  std::string s = "bleu/n" + std::to_string(max_order) + "/" +
                  (case_sensitive ? "cased" : "lc") + "/tok13a/";
  if (smoothing == Smoothing::none) {
    s += "smooth-none";
  } else {
    char buf[32];
    std::snprintf(buf, sizeof buf, "smooth-add%g", k);
    s += buf;
  }
  return s;
}

BleuConfig sentence_config() {
  BleuConfig c;
  c.smoothing = Smoothing::add_k;
  return c;
}

std::vector<std::string> tokenize_13a(std::string_view text) {
  static const std::regex kSymbols(R"(([\x7B-\x7E\x5B-\x60\x20-\x26\x28-\x2B\x3A-\x40\x2F]))");
  static const std::regex kPeriodCommaUnlessPrecededByDigit(R"(([^0-9])([\.,]))");
  static const std::regex kPeriodCommaUnlessFollowedByDigit(R"(([\.,])([^0-9]))");
  static const std::regex kDashPrecededByDigit(R"(([0-9])(-))");
  std::string s = " " + std::string(text) + " ";
  s = std::regex_replace(s, kSymbols, " $1 ");
  s = std::regex_replace(s, kPeriodCommaUnlessPrecededByDigit, "$1 $2 ");
  s = std::regex_replace(s, kPeriodCommaUnlessFollowedByDigit, " $1 $2");
  s = std::regex_replace(s, kDashPrecededByDigit, "$1 $2 ");
  return text::split_whitespace(s);
}

double bleu_from_stats(const kernels::NgramStats& st, const BleuConfig& cfg) {
  cfg.validate();
  if (st.hyp_len == 0) return st.ref_len == 0 ? 100.0 : 0.0;
  double log_sum = 0.0;
  int used = 0;
  for (int n = 0; n < cfg.max_order; ++n) {
    const double total = static_cast<double>(st.totals[n]);
    double match = static_cast<double>(st.matches[n]);
    if (st.totals[n] == 0) continue;
    double denom = total;
    if (cfg.smoothing == Smoothing::add_k && n > 0) {
      match += cfg.k;
      denom += cfg.k;
    }
    if (match == 0.0) return 0.0;
    log_sum += std::log(match / denom);
    ++used;
  }
  const double h = static_cast<double>(st.hyp_len);
  const double r = static_cast<double>(st.ref_len);
  const double bp = h < r ? std::exp(1.0 - r / h) : 1.0;
  return 100.0 * bp * std::exp(log_sum / used);
}

namespace {

kernels::TokenSeq tokens(std::string_view s, const BleuConfig& cfg) {
  return cfg.case_sensitive ? tokenize_13a(s) : tokenize_13a(text::to_lower_ascii(s));
}

}  // namespace

double corpus_bleu(std::span<const std::string> hypotheses,
                   std::span<const std::string> references, const BleuConfig& cfg) {
  cfg.validate();
  if (hypotheses.size() != references.size()) {
    throw Error("precondition", "corpus_bleu: hypothesis and reference counts differ");
  }
  if (hypotheses.empty()) throw Error("precondition", "corpus_bleu: empty corpus");
  std::vector<kernels::TokenSeq> hyp(hypotheses.size()), ref(references.size());
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    hyp[i] = tokens(hypotheses[i], cfg);
    ref[i] = tokens(references[i], cfg);
  }
  return bleu_from_stats(kernels::corpus_ngram_stats(hyp, ref, cfg.max_order), cfg);
}

double sentence_bleu(std::string_view hypothesis, std::string_view reference,
                     const BleuConfig& cfg) {
  cfg.validate();
  return bleu_from_stats(
      kernels::segment_ngram_stats(tokens(hypothesis, cfg), tokens(reference, cfg), cfg.max_order),
      cfg);
}

}  // namespace stylepipe::eval
