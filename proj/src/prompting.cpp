// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "stylepipe/prompting.hpp"

#include <algorithm>
#include <array>
#include <regex>

#include "stylepipe/error.hpp"
#include "stylepipe/log.hpp"
#include "stylepipe/template_assets.hpp"
#include "stylepipe/text.hpp"

namespace stylepipe::prompting {
namespace {

std::string_view strip_final_newline(std::string_view s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<TemplateSegment> parse_layout(std::string_view asset) {
  std::vector<TemplateSegment> out;
  asset = strip_final_newline(asset);
  std::size_t pos = 0;
  while (pos <= asset.size()) {
    std::size_t nl = asset.find('\n', pos);
    if (nl == std::string_view::npos) nl = asset.size();
    std::string line(asset.substr(pos, nl - pos));
    pos = nl + 1;
    SegmentRole role = SegmentRole::instruction;
    if (line.find(kQuerySlot) != std::string::npos) {
      role = SegmentRole::query;
    } else if (line.find(kExampleInputSlot) != std::string::npos) {
      role = SegmentRole::example;
    } else if (line.find(kInputTermSlot) != std::string::npos) {
      role = SegmentRole::guidance;
    } else if (line.find(kCountSlot) != std::string::npos) {
      role = SegmentRole::example_header;
    }
    out.push_back({role, std::move(line)});
  }
  return out;
}

constexpr std::array<std::string_view, 7> kAllSlots = {
    kStyleSlot, kCountSlot, kExampleInputSlot, kExampleOutputSlot,
    kInputTermSlot, kOutputTermSlot, kQuerySlot};

std::string regex_escape(std::string_view s) {
  static constexpr std::string_view kSpecial = R"(.^$|()[]{}*+?\/)";
  std::string out;
  for (char c : s) {
    if (kSpecial.find(c) != std::string_view::npos) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

// Anchored regex for one segment. The query slot is greedy, every other slot
// lazy; `query_group` receives the capture index of the query (0 if absent).
std::regex segment_regex(std::string_view segment, int* query_group,
                         std::vector<std::string_view>* slot_order = nullptr) {
  std::string pattern = "^";
  int group = 0;
  *query_group = 0;
  std::size_t i = 0;
  while (i < segment.size()) {
    bool matched = false;
    for (auto slot : kAllSlots) {
      if (segment.substr(i, slot.size()) == slot) {
        ++group;
        if (slot == kQuerySlot) {
          *query_group = group;
          pattern += "(.*)";
        } else {
          pattern += "(.*?)";
        }
        if (slot_order) slot_order->push_back(slot);
        i += slot.size();
        matched = true;
        break;
      }
    }
    if (!matched) {
      pattern += regex_escape(segment.substr(i, 1));
      ++i;
    }
  }
  pattern += "$";
  return std::regex(pattern);
}

struct QueryMatcher {
  std::regex re;
  int group = 0;
  bool from_end = true;  // scan lines from the last one
};

const std::vector<QueryMatcher>& query_matchers() {
  static const std::vector<QueryMatcher> matchers = [] {
    std::vector<QueryMatcher> out;
    for (auto t : {TemplateId::I, TemplateId::II, TemplateId::III}) {
      const auto& segs = layout(t);
      for (std::size_t s = 0; s < segs.size(); ++s) {
        if (segs[s].role != SegmentRole::query) continue;
        QueryMatcher m;
        m.re = segment_regex(segs[s].text, &m.group);
        m.from_end = s + 1 == segs.size();
        out.push_back(std::move(m));
      }
    }
    return out;
  }();
  return matchers;
}

std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t nl = s.find('\n', pos);
    if (nl == std::string_view::npos) nl = s.size();
    out.push_back(s.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

}  // namespace

std::string_view to_string(TemplateId t) {
  switch (t) {
    case TemplateId::I: return "I";
    case TemplateId::II: return "II";
    case TemplateId::III: return "III";
  }
  return "?";
}

TemplateId template_from_string(std::string_view s) {
  if (s == "I" || s == "1") return TemplateId::I;
  if (s == "II" || s == "2") return TemplateId::II;
  if (s == "III" || s == "3") return TemplateId::III;
  throw Error("config", "unknown prompt template: " + std::string(s));
}

std::string_view to_string(ShotOrder o) {
  return o == ShotOrder::most_similar_last ? "most-similar-last" : "most-similar-first";
}

ShotOrder shot_order_from_string(std::string_view s) {
  if (s == "most-similar-last" || s == "most_similar_last") return ShotOrder::most_similar_last;
  if (s == "most-similar-first" || s == "most_similar_first") return ShotOrder::most_similar_first;
  throw Error("config", "unknown shot order: " + std::string(s));
}

void PromptSpec::validate() const {
  if (text::trim(style_name).empty()) throw Error("config", "style name must be nonempty");
}

Json PromptSpec::to_json() const {
  return Json{{"template", std::string(to_string(tmpl))},
              {"style_name", style_name},
              {"k", k},
              {"include_terms", include_terms},
              {"shot_order", std::string(to_string(shot_order))}};
}

std::string_view asset_text(TemplateId t) {
  switch (t) {
    case TemplateId::I: return assets::kTemplateI;
    case TemplateId::II: return assets::kTemplateII;
    case TemplateId::III: return assets::kTemplateIII;
  }
  throw Error("config", "unknown template");
}

const std::vector<TemplateSegment>& layout(TemplateId t) {
  static const std::array<std::vector<TemplateSegment>, 3> layouts = {
      parse_layout(assets::kTemplateI), parse_layout(assets::kTemplateII),
      parse_layout(assets::kTemplateIII)};
  return layouts[static_cast<std::size_t>(t)];
}

std::string fill_slots(std::string_view segment,
                       const std::vector<std::pair<std::string_view, std::string_view>>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < segment.size()) {
    bool replaced = false;
    if (segment[i] == '[') {
      for (const auto& [slot, value] : values) {
        if (segment.substr(i, slot.size()) == slot) {
          out.append(value);
          i += slot.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out.push_back(segment[i++]);
  }
  return out;
}

RenderedPrompt render(std::string_view query, const PromptSpec& spec,
                      const retrieval::ShotSet& shots,
                      const std::optional<std::string>& guidance) {
  spec.validate();
  if (query.find(kQuerySlot) != std::string_view::npos) {
    throw Error("injection", "query contains the literal placeholder \"[query input]\"");
  }
  if (guidance && !spec.include_terms) {
    throw Error("precondition", "guidance given but the prompt spec excludes terms");
  }
  std::vector<const retrieval::Shot*> used;
  for (const auto& s : shots.shots) {
    if (used.size() == spec.k) break;
    used.push_back(&s);
  }
  if (used.size() < spec.k) {
    spdlog::debug("render: {} of {} requested shots available", used.size(), spec.k);
  }
  if (spec.shot_order == ShotOrder::most_similar_last) std::reverse(used.begin(), used.end());

  RenderedPrompt out;
  out.tmpl = spec.tmpl;
  const std::string count = std::to_string(used.size());
  std::vector<std::string> lines;
  for (const auto& seg : layout(spec.tmpl)) {
    switch (seg.role) {
      case SegmentRole::instruction:
        lines.push_back(fill_slots(seg.text, {{kStyleSlot, spec.style_name}}));
        break;
      case SegmentRole::example_header:
        if (!used.empty()) {
          lines.push_back(fill_slots(seg.text, {{kStyleSlot, spec.style_name}, {kCountSlot, count}}));
        }
        break;
      case SegmentRole::example:
        for (const auto* s : used) {
          lines.push_back(fill_slots(seg.text, {{kStyleSlot, spec.style_name},
                                                {kExampleInputSlot, s->pair.neutral},
                                                {kExampleOutputSlot, s->pair.target}}));
          out.shot_ids.push_back(s->pair.id);
        }
        break;
      case SegmentRole::guidance:
        if (guidance) lines.push_back(*guidance);
        break;
      case SegmentRole::query:
        lines.push_back(fill_slots(seg.text, {{kStyleSlot, spec.style_name}, {kQuerySlot, query}}));
        break;
    }
  }
  out.prompt = text::join(lines, kSegmentSeparator);
  return out;
}

RenderedPrompt render_training_record(const dataset::PseudoPair& pair,
                                      const PromptSpec& spec,
                                      const retrieval::ShotSet& shots,
                                      const std::optional<std::string>& guidance) {
  for (const auto& s : shots.shots) {
    if (s.pair.id == pair.id) {
      throw Error("leakage", "training shots contain the record itself: " + pair.id);
    }
    if (s.pair.target == pair.target) {
      spdlog::debug("render: shot {} has the same target text as {}", s.pair.id, pair.id);
    }
  }
  auto out = render(pair.neutral, spec, shots, guidance);
  out.completion = pair.target;
  return out;
}

std::optional<std::string> extract_query(std::string_view prompt) {
  auto lines = split_lines(prompt);
  for (const auto& m : query_matchers()) {
    auto try_line = [&](std::string_view line) -> std::optional<std::string> {
      std::match_results<std::string_view::const_iterator> mr;
      if (std::regex_match(line.begin(), line.end(), mr, m.re)) return mr[m.group].str();
      return std::nullopt;
    };
    if (m.from_end) {
      if (auto q = try_line(lines.back())) return q;
    } else {
      if (auto q = try_line(lines.front())) return q;
    }
  }
  return std::nullopt;
}

std::optional<std::string> completion_cue(TemplateId t) {
  switch (t) {
    case TemplateId::I: return "output:";
    case TemplateId::III: return "domain:";
    case TemplateId::II: return std::nullopt;
  }
  return std::nullopt;
}

namespace {

constexpr std::string_view kSourceSentenceSlot = "[source-side sentence]";
constexpr std::string_view kTargetSentenceSlot = "[target-side sentence]";
constexpr std::string_view kRetrievedWordSlot = "[source-side retrieved word]";

std::string escape_all_but(std::string_view asset, std::string_view a,
                           std::string_view b = {}) {
  std::string pattern = "^";
  std::size_t i = 0;
  while (i < asset.size()) {
    if (asset.substr(i, a.size()) == a) {
      pattern += b.empty() ? "(.*)" : "(.+?)";
      i += a.size();
    } else if (!b.empty() && asset.substr(i, b.size()) == b) {
      pattern += "(.*)";
      i += b.size();
    } else {
      pattern += regex_escape(asset.substr(i, 1));
      ++i;
    }
  }
  return pattern + "$";
}

}  // namespace

std::string render_term_extract(std::string_view source_sentence) {
  return fill_slots(strip_final_newline(assets::kTermExtract),
                    {{kSourceSentenceSlot, source_sentence}});
}

std::string render_term_align(std::string_view term, std::string_view target_sentence) {
  return fill_slots(strip_final_newline(assets::kTermAlign),
                    {{kRetrievedWordSlot, term}, {kTargetSentenceSlot, target_sentence}});
}

std::optional<std::string> parse_term_extract(std::string_view prompt) {
  static const std::regex re(
      escape_all_but(strip_final_newline(assets::kTermExtract), kSourceSentenceSlot));
  std::match_results<std::string_view::const_iterator> mr;
  if (!std::regex_match(prompt.begin(), prompt.end(), mr, re)) return std::nullopt;
  return mr[1].str();
}

std::optional<std::pair<std::string, std::string>> parse_term_align(std::string_view prompt) {
  static const std::regex re(escape_all_but(strip_final_newline(assets::kTermAlign),
                                            kRetrievedWordSlot, kTargetSentenceSlot));
  std::match_results<std::string_view::const_iterator> mr;
  if (!std::regex_match(prompt.begin(), prompt.end(), mr, re)) return std::nullopt;
  return std::make_pair(mr[1].str(), mr[2].str());
}

std::string_view guidance_pattern() { return strip_final_newline(assets::kGuidance); }

}  // namespace stylepipe::prompting
