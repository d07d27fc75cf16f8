// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "stylepipe/corpus.hpp"
#include "stylepipe/mt.hpp"

namespace stylepipe::dataset {

// Neutral (roundtripped) source side paired with the original in-style text.
struct PseudoPair {
  std::string id;
  std::string neutral;
  std::string target;
  std::string pivot_lang;
  std::string domain;
  std::vector<std::string> flags;  // e.g. "trivial_pair"

  bool has_flag(std::string_view f) const;
  bool operator==(const PseudoPair&) const = default;
};

inline constexpr std::string_view kTrivialPair = "trivial_pair";

struct PairPolicy {
  double min_ratio = 0.5;  // neutral tokens / target tokens, inclusive
  double max_ratio = 2.0;
  std::size_t min_neutral_tokens = 2;
};

using DropLog = std::vector<std::pair<std::string, std::string>>;  // (id, reason)

// Empty reason means the pair is kept.
std::string filter_reason(const PseudoPair& p, const PairPolicy& policy);

std::vector<PseudoPair> filter_pairs(std::vector<PseudoPair> pairs,
                                     const PairPolicy& policy,
                                     DropLog* drops = nullptr);

struct BuildReport {
  std::size_t records = 0;
  std::size_t roundtrip_failed = 0;
  std::size_t filtered = 0;
  std::size_t pairs = 0;
  std::size_t trivial = 0;
  double failure_rate = 0.0;
  bool degraded = false;
  DropLog drops;

  Json to_json() const;
};

struct BuildResult {
  std::vector<PseudoPair> pairs;  // sorted by id
  BuildReport report;
};

inline constexpr double kDegradedFailureRate = 0.2;

// `roundtrips[i]` must belong to `records[i]`.
BuildResult assemble_pairs(const std::vector<corpus::CorpusRecord>& records,
                           const std::vector<mt::RoundtripResult>& roundtrips,
                           const PairPolicy& policy = {},
                           double degraded_threshold = kDegradedFailureRate);

BuildResult build_pairs(const std::vector<corpus::CorpusRecord>& records,
                        mt::Gateway& gateway, const std::string& pivot,
                        const PairPolicy& policy = {});

struct DatasetSplit {
  std::vector<std::string> train;               // pair ids
  std::vector<std::string> heldout_classifier;  // record ids
  std::vector<std::string> test;                // record ids

  Json to_json() const;
  static DatasetSplit from_json(const Json& j);
};

enum class SplitZone { heldout, test, train };

// unit_hash(id) < f -> held-out, < 2f -> test, otherwise train.
SplitZone zone_of(std::string_view record_id, double heldout_fraction);

// Train-zone records that produced no surviving pair go to the classifier
// held-out set, so the three parts always cover every record.
DatasetSplit split(const std::vector<PseudoPair>& pairs,
                   const std::vector<corpus::CorpusRecord>& records,
                   const corpus::StyleDomain& domain);

Json to_json(const PseudoPair& p);
PseudoPair pair_from_json(const Json& j);
void write_pairs(const std::filesystem::path& path, const std::vector<PseudoPair>& pairs);
std::vector<PseudoPair> read_pairs(const std::filesystem::path& path);

}  // namespace stylepipe::dataset
