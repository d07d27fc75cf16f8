// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "stylepipe/corpus.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

#include "stylepipe/error.hpp"
#include "stylepipe/hash.hpp"
#include "stylepipe/log.hpp"
#include "stylepipe/text.hpp"

namespace stylepipe::corpus {
namespace {

constexpr std::string_view kAbbreviations[] = {
    "Mr.",    "Mrs.",  "Ms.",   "Dr.",  "Prof.",  "Sr.",   "Jr.",   "St.",
    "Mt.",    "vs.",   "etc.",  "e.g.", "i.e.",   "U.S.",  "U.K.",  "U.N.",
    "No.",    "Nos.",  "Inc.",  "Ltd.", "Corp.",  "Co.",   "Jan.",  "Feb.",
    "Mar.",   "Apr.",  "Jun.",  "Jul.", "Aug.",   "Sep.",  "Sept.", "Oct.",
    "Nov.",   "Dec.",  "Fig.",  "Figs.", "Eq.",   "Sec.",  "Vol.",  "pp.",
    "p.",     "cf.",   "al.",   "approx.", "Gov.", "Sen.", "Rep.",  "Gen.",
    "Col.",   "Lt.",   "Capt.", "Rev.", "Hon.",   "Dept.", "Univ.", "Ave.",
    "Blvd.",  "a.m.",  "p.m.",  "U.S.C."};

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_closer(std::string_view s, std::size_t i, std::size_t* width) {
  char c = s[i];
  if (c == '"' || c == '\'' || c == ')' || c == ']') {
    *width = 1;
    return true;
  }
  // U+2019 and U+201D
  if (s.substr(i, 3) == "\xE2\x80\x99" || s.substr(i, 3) == "\xE2\x80\x9D") {
    *width = 3;
    return true;
  }
  return false;
}

bool is_opener(std::string_view s, std::size_t i, std::size_t* width) {
  char c = s[i];
  if (c == '"' || c == '\'' || c == '(' || c == '[') {
    *width = 1;
    return true;
  }
  // U+2018 and U+201C
  if (s.substr(i, 3) == "\xE2\x80\x98" || s.substr(i, 3) == "\xE2\x80\x9C") {
    *width = 3;
    return true;
  }
  return false;
}

// Token ending at `end` (exclusive), stripped of opening punctuation.
std::string_view token_before(std::string_view s, std::size_t end) {
  std::size_t b = end;
  while (b > 0 && !text::is_space(static_cast<unsigned char>(s[b - 1]))) --b;
  std::string_view tok = s.substr(b, end - b);
  while (!tok.empty() && (tok.front() == '"' || tok.front() == '\'' ||
                          tok.front() == '(' || tok.front() == '[')) {
    tok.remove_prefix(1);
  }
  return tok;
}

bool is_blank_line_break(std::string_view s, std::size_t i, std::size_t* end) {
  if (s[i] != '\n') return false;
  std::size_t j = i + 1;
  while (j < s.size() && (s[j] == ' ' || s[j] == '\t' || s[j] == '\r')) ++j;
  if (j < s.size() && s[j] == '\n') {
    while (j < s.size() && text::is_space(static_cast<unsigned char>(s[j]))) ++j;
    *end = j;
    return true;
  }
  return false;
}

}  // namespace

void StyleDomain::validate() const {
  if (name.empty()) throw Error("config", "style domain name must be nonempty");
  if (!(heldout_fraction > 0.0 && heldout_fraction < 0.5)) {
    throw Error("config", "domain '" + name +
                              "': heldout_fraction must lie in (0, 0.5)");
  }
}

bool is_abbreviation(std::string_view token) {
  return std::find(std::begin(kAbbreviations), std::end(kAbbreviations), token) !=
         std::end(kAbbreviations);
}

std::vector<Segment> segment_sentences(std::string_view doc) {
  std::vector<Segment> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    std::string_view raw = doc.substr(start, end - start);
    std::size_t lead = 0;
    while (lead < raw.size() && text::is_space(static_cast<unsigned char>(raw[lead]))) {
      ++lead;
    }
    std::string sentence = text::collapse_whitespace(raw);
    if (!sentence.empty()) out.push_back({start + lead, std::move(sentence)});
  };

  std::size_t i = 0;
  while (i < doc.size()) {
    std::size_t para_end = 0;
    if (is_blank_line_break(doc, i, &para_end)) {
      emit(i);
      start = para_end;
      i = para_end;
      continue;
    }
    if (!is_terminal(doc[i])) {
      ++i;
      continue;
    }
    const bool period = doc[i] == '.';
    std::size_t j = i + 1;
    while (j < doc.size()) {
      std::size_t w = 0;
      if (is_terminal(doc[j])) {
        ++j;
      } else if (is_closer(doc, j, &w)) {
        j += w;
      } else {
        break;
      }
    }
    std::size_t k = j;
    bool saw_newline = false;
    while (k < doc.size() && text::is_space(static_cast<unsigned char>(doc[k]))) {
      saw_newline |= doc[k] == '\n';
      ++k;
    }
    bool boundary = false;
    if (k == doc.size()) {
      boundary = true;
    } else if (k > j) {
      std::size_t m = k, w = 0;
      while (m < doc.size() && is_opener(doc, m, &w)) m += w;
      bool upper = m < doc.size() && doc[m] >= 'A' && doc[m] <= 'Z';
      boundary = saw_newline || upper;
      if (boundary && period && is_abbreviation(token_before(doc, i + 1))) {
        boundary = false;
      }
    }
    if (boundary) {
      emit(j);
      start = j;
    }
    i = j;
  }
  if (start < doc.size()) emit(doc.size());
  return out;
}

std::string make_record_id(std::string_view domain, std::string_view source,
                           std::size_t offset) {
  std::string off = std::to_string(offset);
  return sha256_hex(key_of({domain, source, off})).substr(0, 16);
}

std::string IngestStats::table_row(std::string_view domain) const {
  return std::string(domain) + "\ten monolingual\t" +
         text::with_thousands(sentences) + "\t" + text::with_thousands(words);
}

namespace {

std::size_t line_of(std::string_view bytes, std::size_t offset,
                    std::size_t* cursor, std::size_t* line) {
  for (; *cursor < offset && *cursor < bytes.size(); ++*cursor) {
    if (bytes[*cursor] == '\n') ++*line;
  }
  return *line;
}

void add_document(std::string_view doc, std::size_t base_offset,
                  const std::string& source_prefix, std::string_view file_bytes,
                  bool line_from_offset, std::size_t fixed_line,
                  const StyleDomain& domain, IngestResult& result) {
  std::size_t cursor = 0, line = 1;
  for (auto& seg : segment_sentences(doc)) {
    std::size_t lineno =
        line_from_offset
            ? line_of(file_bytes, base_offset + seg.offset, &cursor, &line)
            : fixed_line;
    std::string source = source_prefix + ":" + std::to_string(lineno);
    CorpusRecord rec;
    rec.id = make_record_id(domain.name, source, base_offset + seg.offset);
    rec.domain = domain.name;
    rec.source = std::move(source);
    result.stats.words += text::count_tokens(seg.text);
    rec.text = std::move(seg.text);
    result.records.push_back(std::move(rec));
  }
  ++result.stats.documents;
}

}  // namespace

IngestResult ingest_bytes(std::string_view raw, InputFormat format,
                          std::string_view source_name,
                          const StyleDomain& domain) {
  domain.validate();
  IngestResult result;
  auto repaired = text::sanitize_utf8(raw);
  result.stats.invalid_bytes = repaired.invalid_bytes;
  const std::string& bytes = repaired.text;
  const std::string prefix(source_name);
  if (repaired.invalid_bytes > 0) {
    result.stats.warnings.push_back(prefix + ": replaced " +
                                    std::to_string(repaired.invalid_bytes) +
                                    " invalid UTF-8 bytes");
  }

  if (format == InputFormat::plain_text) {
    add_document(bytes, 0, prefix, bytes, true, 0, domain, result);
  } else {
    std::size_t pos = 0, lineno = 0;
    while (pos < bytes.size()) {
      std::size_t nl = bytes.find('\n', pos);
      if (nl == std::string::npos) nl = bytes.size();
      std::string_view line = std::string_view(bytes).substr(pos, nl - pos);
      ++lineno;
      pos = nl + 1;
      if (text::trim(line).empty()) continue;
      Json j;
      try {
        j = Json::parse(line);
      } catch (const Json::parse_error& e) {
        throw Error("parse", prefix + ":" + std::to_string(lineno) + ": " + e.what());
      }
      if (!j.is_object() || !j.contains("text") || !j["text"].is_string()) {
        throw Error("parse", prefix + ":" + std::to_string(lineno) +
                                 ": expected an object with a \"text\" string");
      }
      add_document(j["text"].get<std::string>(), 0, prefix, {}, false, lineno,
                   domain, result);
    }
  }
  result.stats.sentences = result.records.size();
  if (result.records.empty()) {
    result.stats.warnings.push_back(prefix + ": no sentences found");
  }
  return result;
}

IngestResult ingest(const std::filesystem::path& path, const StyleDomain& domain,
                    std::string source_name) {
  std::string bytes = read_file(path);
  if (source_name.empty()) source_name = path.generic_string();
  auto format = path.extension() == ".jsonl" ? InputFormat::jsonl
                                             : InputFormat::plain_text;
  auto result = ingest_bytes(bytes, format, source_name, domain);
  for (const auto& w : result.stats.warnings) spdlog::warn("{}", w);
  return result;
}

std::string_view to_string(DropReason r) {
  switch (r) {
    case DropReason::too_short: return "too_short";
    case DropReason::too_long: return "too_long";
    case DropReason::non_text: return "non_text";
    case DropReason::duplicate: return "duplicate";
  }
  return "unknown";
}

double alpha_ratio(std::string_view s) {
  std::size_t total = 0, alpha = 0;
  for (char32_t cp : text::decode_utf8(s)) {
    if (cp < 0x80 && text::is_space(static_cast<unsigned char>(cp))) continue;
    ++total;
    bool letter = (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
                  (cp >= 0xC0 && cp != 0xD7 && cp != 0xF7 &&
                   !(cp >= 0x2000 && cp <= 0x2BFF) && !(cp >= 0x3000 && cp <= 0x303F) &&
                   cp != 0xFFFD);
    if (letter) ++alpha;
  }
  return total == 0 ? 0.0 : static_cast<double>(alpha) / static_cast<double>(total);
}

CleanResult clean(const std::vector<CorpusRecord>& records,
                  const CleanPolicy& policy) {
  CleanResult out;
  std::unordered_set<std::string_view> seen;
  for (const auto& r : records) {
    std::size_t n = text::count_tokens(r.text);
    if (n < policy.min_tokens) {
      out.drops.push_back({r.id, DropReason::too_short});
    } else if (n > policy.max_tokens) {
      out.drops.push_back({r.id, DropReason::too_long});
    } else if (alpha_ratio(r.text) < policy.min_alpha_ratio) {
      out.drops.push_back({r.id, DropReason::non_text});
    } else if (policy.dedup && !seen.insert(r.text).second) {
      out.drops.push_back({r.id, DropReason::duplicate});
    } else {
      out.kept.push_back(r);
    }
  }
  for (const auto& d : out.drops) {
    spdlog::debug("clean: dropped {} ({})", d.id, to_string(d.reason));
  }
  return out;
}

Json to_json(const CorpusRecord& r) {
  return Json{{"id", r.id}, {"text", r.text}, {"domain", r.domain}, {"source", r.source}};
}

CorpusRecord record_from_json(const Json& j) {
  CorpusRecord r;
  r.id = j.at("id").get<std::string>();
  r.text = j.at("text").get<std::string>();
  r.domain = j.at("domain").get<std::string>();
  r.source = j.value("source", "");
  return r;
}

void write_corpus(const std::filesystem::path& path,
                  const std::vector<CorpusRecord>& records) {
  JsonlWriter w(path);
  for (const auto& r : records) w.write(to_json(r));
  w.close();
}

std::vector<CorpusRecord> read_corpus(const std::filesystem::path& path) {
  std::vector<CorpusRecord> out;
  for (const auto& j : read_jsonl(path)) out.push_back(record_from_json(j));
  return out;
}

}  // namespace stylepipe::corpus
