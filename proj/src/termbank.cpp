// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "stylepipe/termbank.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "stylepipe/error.hpp"
#include "stylepipe/log.hpp"
#include "stylepipe/parallel.hpp"
#include "stylepipe/prompting.hpp"
#include "stylepipe/text.hpp"

namespace stylepipe::termbank {
namespace {

std::string_view strip_decoration(std::string_view s) {
  s = text::trim(s);
  auto is_quote = [](char c) { return c == '"' || c == '\'' || c == '`'; };
  while (!s.empty() && is_quote(s.front())) s.remove_prefix(1);
  while (!s.empty() && (is_quote(s.back()) || s.back() == '.')) s.remove_suffix(1);
  return text::trim(s);
}

std::string_view first_line(std::string_view s) {
  s = text::trim(s);
  return s.substr(0, s.find('\n'));
}

bool is_none_answer(std::string_view s) {
  auto l = text::to_lower_ascii(strip_decoration(s));
  return l == "none" || l == "n/a" || l == "no terms";
}

}  // namespace

std::vector<std::string> parse_term_list(std::string_view response, std::string_view neutral,
                                         const ExtractOptions& options) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::string_view line = first_line(response);
  if (line.empty() || is_none_answer(line)) return out;
  std::size_t pos = 0;
  while (pos <= line.size() && out.size() < options.max_terms) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) comma = line.size();
    std::string term = text::collapse_whitespace(strip_decoration(line.substr(pos, comma - pos)));
    pos = comma + 1;
    if (term.empty() || text::count_tokens(term) > options.max_term_words) continue;
    if (!seen.insert(text::to_lower_ascii(term)).second) continue;
    if (!text::contains_whole_word(neutral, term)) {
      spdlog::debug("termbank: dropped '{}' absent from the neutral text", term);
      continue;
    }
    out.push_back(std::move(term));
  }
  return out;
}

std::vector<std::string> extract_terms(const dataset::PseudoPair& pair,
                                       generation::Generator& llm,
                                       const ExtractOptions& options) {
  auto response = llm.generate(prompting::render_term_extract(pair.neutral));
  auto terms = parse_term_list(response, pair.neutral, options);
  if (terms.empty() && !text::trim(response).empty() && !is_none_answer(first_line(response))) {
    spdlog::debug("termbank: no usable terms in answer for {}", pair.id);
  }
  return terms;
}

std::optional<std::string> parse_alignment(std::string_view response, std::string_view target,
                                           const ExtractOptions& options) {
  std::string word = text::collapse_whitespace(strip_decoration(first_line(response)));
  if (word.empty() || text::count_tokens(word) > options.max_target_words) return std::nullopt;
  if (!text::contains_whole_word(target, word)) return std::nullopt;
  return word;
}

std::optional<std::string> align_term(const std::string& term, const dataset::PseudoPair& pair,
                                      generation::Generator& llm,
                                      const ExtractOptions& options) {
  auto response = llm.generate(prompting::render_term_align(term, pair.target));
  return parse_alignment(response, pair.target, options);
}

std::vector<TermPair> merge_observations(const std::vector<Observation>& observations,
                                         const std::string& domain, std::size_t min_support) {
  // Keyed case-insensitively; each side keeps its most frequent surface form,
  // ties going to the lexicographically larger (lowercase) spelling.
  using Key = std::pair<std::string, std::string>;
  std::map<Key, std::set<std::string>> support;
  std::map<std::string, std::map<std::string, std::size_t>> forms;
  for (const auto& o : observations) {
    if (o.source_term.empty() || o.target_term.empty()) continue;
    Key key{text::to_lower_ascii(o.source_term), text::to_lower_ascii(o.target_term)};
    if (key.first == key.second) continue;
    support[key].insert(o.pair_id);
    ++forms[key.first][o.source_term];
    ++forms[key.second][o.target_term];
  }
  auto surface = [&](const std::string& lower) {
    const auto& f = forms.at(lower);
    auto best = f.begin();
    for (auto it = f.begin(); it != f.end(); ++it) {
      if (it->second >= best->second) best = it;
    }
    return best->first;
  };
  std::map<std::string, std::vector<TermPair>> by_source;
  for (const auto& [key, ids] : support) {
    if (ids.size() < min_support) continue;
    by_source[key.first].push_back(
        TermPair{surface(key.first), surface(key.second), domain, ids.size(), false});
  }
  std::vector<TermPair> out;
  for (auto& [source, candidates] : by_source) {
    std::size_t best = 0;
    for (const auto& c : candidates) best = std::max(best, c.support);
    std::vector<TermPair> winners;
    for (auto& c : candidates) {
      if (c.support == best) winners.push_back(std::move(c));
    }
    const bool ambiguous = winners.size() > 1;
    for (auto& w : winners) {
      w.ambiguous = ambiguous;
      out.push_back(std::move(w));
    }
    if (candidates.size() > winners.size()) {
      spdlog::debug("termbank: '{}' had {} competing targets", source, candidates.size());
    }
  }
  return out;
}

std::vector<TermPair> build_bank(const std::vector<dataset::PseudoPair>& pairs,
                                 generation::Generator& llm, const std::string& domain,
                                 const BankOptions& options) {
  std::vector<std::vector<Observation>> per_pair(pairs.size());
  parallel_for_bounded(pairs.size(), options.workers, [&](std::size_t i) {
    const auto& p = pairs[i];
    for (const auto& term : extract_terms(p, llm, options.extract)) {
      if (auto target = align_term(term, p, llm, options.extract)) {
        per_pair[i].push_back({term, *target, p.id});
      }
    }
  });
  std::vector<Observation> all;
  for (auto& v : per_pair) {
    for (auto& o : v) all.push_back(std::move(o));
  }
  auto bank = merge_observations(all, domain, options.min_support);
  spdlog::info("termbank[{}]: {} observations from {} pairs, {} entries", domain, all.size(),
               pairs.size(), bank.size());
  return bank;
}

std::vector<TermMatch> match_triggers(std::string_view query, const std::vector<TermPair>& bank,
                                      std::size_t max_matches) {
  std::vector<TermMatch> candidates;
  for (const auto& p : bank) {
    if (p.ambiguous) continue;
    for (std::size_t start : text::find_whole_word(query, p.source_term)) {
      candidates.push_back({p, start, start + p.source_term.size()});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const TermMatch& a, const TermMatch& b) {
    const auto la = a.end - a.start, lb = b.end - b.start;
    if (la != lb) return la > lb;
    if (a.start != b.start) return a.start < b.start;
    return a.pair.source_term < b.pair.source_term;
  });
  std::vector<TermMatch> out;
  for (auto& c : candidates) {
    if (out.size() == max_matches) break;
    const bool overlaps = std::any_of(out.begin(), out.end(), [&](const TermMatch& m) {
      return c.start < m.end && m.start < c.end;
    });
    if (!overlaps) out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(),
            [](const TermMatch& a, const TermMatch& b) { return a.start < b.start; });
  return out;
}

std::optional<std::string> render_guidance(const std::vector<TermMatch>& matches) {
  if (matches.empty()) return std::nullopt;
  const std::string_view pattern = prompting::guidance_pattern();
  // Pattern: prefix "[input term]" to "[output term]" suffix.
  const std::string open = "\"" + std::string(prompting::kInputTermSlot);
  const std::string close = std::string(prompting::kOutputTermSlot) + "\"";
  const auto a = pattern.find(open);
  const auto b = pattern.find(close);
  if (a == std::string_view::npos || b == std::string_view::npos) {
    throw Error("config", "guidance asset lacks the term slots");
  }
  std::vector<std::string> mappings;
  for (const auto& m : matches) {
    mappings.push_back(prompting::fill_slots(pattern.substr(a, b + close.size() - a),
                                             {{prompting::kInputTermSlot, m.pair.source_term},
                                              {prompting::kOutputTermSlot, m.pair.target_term}}));
  }
  return std::string(pattern.substr(0, a)) + text::join(mappings, ", ") +
         std::string(pattern.substr(b + close.size()));
}

Json to_json(const TermPair& p) {
  return Json{{"source_term", p.source_term},
              {"target_term", p.target_term},
              {"domain", p.domain},
              {"support", p.support},
              {"ambiguous", p.ambiguous}};
}

TermPair term_pair_from_json(const Json& j) {
  TermPair p;
  try {
    p.source_term = j.at("source_term").get<std::string>();
    p.target_term = j.at("target_term").get<std::string>();
    p.domain = j.at("domain").get<std::string>();
    p.support = j.at("support").get<std::size_t>();
    p.ambiguous = j.value("ambiguous", false);
  } catch (const Json::exception& e) {
    throw Error("parse", "invalid term pair: " + std::string(e.what()));
  }
  if (p.source_term.empty() || p.target_term.empty() || p.source_term == p.target_term) {
    throw Error("parse", "invalid term pair: " + j.dump());
  }
  return p;
}

void write_bank(const std::filesystem::path& path, const std::vector<TermPair>& bank) {
  JsonlWriter w(path);
  for (const auto& p : bank) w.write(to_json(p));
  w.close();
}

std::vector<TermPair> read_bank(const std::filesystem::path& path) {
  std::vector<TermPair> out;
  for (const auto& j : read_jsonl(path)) out.push_back(term_pair_from_json(j));
  return out;
}

}  // namespace stylepipe::termbank
