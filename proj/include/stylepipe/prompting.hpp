// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stylepipe/dataset.hpp"
#include "stylepipe/retrieval.hpp"

namespace stylepipe::prompting {

enum class TemplateId { I, II, III };
std::string_view to_string(TemplateId t);
TemplateId template_from_string(std::string_view s);

enum class ShotOrder { most_similar_last, most_similar_first };
std::string_view to_string(ShotOrder o);
ShotOrder shot_order_from_string(std::string_view s);

struct PromptSpec {
  TemplateId tmpl = TemplateId::I;
  std::string style_name;
  std::size_t k = 0;
  bool include_terms = false;
  ShotOrder shot_order = ShotOrder::most_similar_last;

  void validate() const;
  Json to_json() const;
};

// Segments are the lines of a template asset; the role of each is given by
// the placeholder it carries.
enum class SegmentRole { instruction, example_header, example, guidance, query };

struct TemplateSegment {
  SegmentRole role;
  std::string text;
};

inline constexpr std::string_view kStyleSlot = "[style name]";
inline constexpr std::string_view kCountSlot = "[n]";
inline constexpr std::string_view kExampleInputSlot = "[example input i]";
inline constexpr std::string_view kExampleOutputSlot = "[example output i]";
inline constexpr std::string_view kInputTermSlot = "[input term]";
inline constexpr std::string_view kOutputTermSlot = "[output term]";
inline constexpr std::string_view kQuerySlot = "[query input]";
inline constexpr std::string_view kSegmentSeparator = "\n";

std::string_view asset_text(TemplateId t);
const std::vector<TemplateSegment>& layout(TemplateId t);

// Replaces slots in one left-to-right pass; inserted values are never
// rescanned, so a value containing a slot name is copied verbatim.
std::string fill_slots(std::string_view segment,
                       const std::vector<std::pair<std::string_view, std::string_view>>& values);

struct RenderedPrompt {
  std::string prompt;
  std::string completion;  // training records only
  std::vector<std::string> shot_ids;  // in prompt order
  std::vector<std::pair<std::string, std::string>> term_mappings;
  TemplateId tmpl = TemplateId::I;
};

// Throws Error("injection") when the query contains "[query input]".
RenderedPrompt render(std::string_view query, const PromptSpec& spec,
                      const retrieval::ShotSet& shots,
                      const std::optional<std::string>& guidance);

// Query = pair.neutral, completion = pair.target. Throws Error("leakage") if
// the shots contain the pair itself.
RenderedPrompt render_training_record(const dataset::PseudoPair& pair,
                                      const PromptSpec& spec,
                                      const retrieval::ShotSet& shots,
                                      const std::optional<std::string>& guidance);

// Recovers the query from a prompt rendered with any template.
std::optional<std::string> extract_query(std::string_view prompt);

// Cue a completion is expected to follow ("output:" for template I), if any.
std::optional<std::string> completion_cue(TemplateId t);

// Terminology extraction prompts (first and second round).
std::string render_term_extract(std::string_view source_sentence);
std::string render_term_align(std::string_view term, std::string_view target_sentence);
std::optional<std::string> parse_term_extract(std::string_view prompt);
std::optional<std::pair<std::string, std::string>> parse_term_align(std::string_view prompt);

std::string_view guidance_pattern();

}  // namespace stylepipe::prompting
