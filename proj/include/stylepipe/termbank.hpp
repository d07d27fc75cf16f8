// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stylepipe/dataset.hpp"
#include "stylepipe/generation.hpp"

namespace stylepipe::termbank {

struct TermPair {
  std::string source_term;
  std::string target_term;
  std::string domain;
  std::size_t support = 0;  // distinct pairs the mapping was extracted from
  bool ambiguous = false;   // tied with another target for the same source

  bool operator==(const TermPair&) const = default;
};

struct TermMatch {
  TermPair pair;
  std::size_t start = 0;  // byte offsets into the query, [start, end)
  std::size_t end = 0;
};

struct ExtractOptions {
  std::size_t max_terms = 8;
  std::size_t max_term_words = 6;
  std::size_t max_target_words = 4;
};

// Parses a comma-separated answer. Terms are trimmed, unquoted, deduplicated
// case-insensitively and kept only when they occur as a whole word in
// `neutral`. At most max_terms survive, in answer order.
std::vector<std::string> parse_term_list(std::string_view response, std::string_view neutral,
                                         const ExtractOptions& options = {});

std::vector<std::string> extract_terms(const dataset::PseudoPair& pair,
                                       generation::Generator& llm,
                                       const ExtractOptions& options = {});

std::optional<std::string> parse_alignment(std::string_view response, std::string_view target,
                                           const ExtractOptions& options = {});

std::optional<std::string> align_term(const std::string& term, const dataset::PseudoPair& pair,
                                      generation::Generator& llm,
                                      const ExtractOptions& options = {});

struct Observation {
  std::string source_term;
  std::string target_term;
  std::string pair_id;
};

struct BankOptions {
  std::size_t min_support = 2;
  std::size_t workers = 4;
  ExtractOptions extract;
};

// Single-threaded reduction. Identity mappings are dropped, then mappings
// below min_support, then the best-supported target per source survives
// (ties survive together, marked ambiguous). Sorted by (source, target).
std::vector<TermPair> merge_observations(const std::vector<Observation>& observations,
                                         const std::string& domain, std::size_t min_support);

std::vector<TermPair> build_bank(const std::vector<dataset::PseudoPair>& pairs,
                                 generation::Generator& llm, const std::string& domain,
                                 const BankOptions& options = {});

inline constexpr std::size_t kMaxMatches = 5;

// Whole-word case-insensitive scan; overlaps resolved longest first, then
// leftmost. Ambiguous entries never trigger. Result sorted by start.
std::vector<TermMatch> match_triggers(std::string_view query, const std::vector<TermPair>& bank,
                                      std::size_t max_matches = kMaxMatches);

// The guidance sentence listing every match; nullopt for no matches.
std::optional<std::string> render_guidance(const std::vector<TermMatch>& matches);

Json to_json(const TermPair& p);
TermPair term_pair_from_json(const Json& j);
void write_bank(const std::filesystem::path& path, const std::vector<TermPair>& bank);
std::vector<TermPair> read_bank(const std::filesystem::path& path);

}  // namespace stylepipe::termbank
