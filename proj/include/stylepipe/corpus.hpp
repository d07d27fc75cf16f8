// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "stylepipe/jsonl.hpp"

namespace stylepipe::corpus {

struct StyleDomain {
  std::string name;
  std::string description;
  double heldout_fraction = 0.1;

  // Throws Error("config") unless the name is nonempty and
  // 0 < heldout_fraction < 0.5.
  void validate() const;
};

struct CorpusRecord {
  std::string id;
  std::string text;
  std::string domain;
  std::string source;  // "<file>:<line>"

  bool operator==(const CorpusRecord&) const = default;
};

struct Segment {
  std::size_t offset = 0;  // byte offset of the first character
  std::string text;        // whitespace-collapsed sentence
};

// Splits on '.', '!' or '?' (plus trailing quotes/brackets) when followed by
// end of text, a line break, or whitespace and an uppercase letter. Blank
// lines are hard boundaries. A '.' that closes a known abbreviation ("U.S.",
// "Dr.", "e.g.", ...) does not end a sentence unless the text ends there.
std::vector<Segment> segment_sentences(std::string_view document);

bool is_abbreviation(std::string_view token);

std::string make_record_id(std::string_view domain, std::string_view source,
                           std::size_t offset);

struct IngestStats {
  std::size_t documents = 0;
  std::size_t sentences = 0;
  std::size_t words = 0;
  std::size_t invalid_bytes = 0;
  std::vector<std::string> warnings;

  // Tab-separated "<domain> en monolingual <#sentence> <#word>" row.
  std::string table_row(std::string_view domain) const;
};

struct IngestResult {
  std::vector<CorpusRecord> records;
  IngestStats stats;
};

enum class InputFormat { plain_text, jsonl };

// `source_name` is the provenance prefix stored in records and hashed into
// ids; it defaults to the path as given.
IngestResult ingest(const std::filesystem::path& path, const StyleDomain& domain,
                    std::string source_name = {});

IngestResult ingest_bytes(std::string_view bytes, InputFormat format,
                          std::string_view source_name,
                          const StyleDomain& domain);

struct CleanPolicy {
  std::size_t min_tokens = 3;
  std::size_t max_tokens = 150;
  double min_alpha_ratio = 0.6;
  bool dedup = true;
};

enum class DropReason { too_short, too_long, non_text, duplicate };
std::string_view to_string(DropReason r);

struct Drop {
  std::string id;
  DropReason reason;
};

struct CleanResult {
  std::vector<CorpusRecord> kept;
  std::vector<Drop> drops;
};

// Fraction of non-whitespace code points that are letters.
double alpha_ratio(std::string_view text);

CleanResult clean(const std::vector<CorpusRecord>& records,
                  const CleanPolicy& policy);

Json to_json(const CorpusRecord& r);
CorpusRecord record_from_json(const Json& j);
void write_corpus(const std::filesystem::path& path,
                  const std::vector<CorpusRecord>& records);
std::vector<CorpusRecord> read_corpus(const std::filesystem::path& path);

}  // namespace stylepipe::corpus
