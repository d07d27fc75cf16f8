// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace stylepipe::text {

bool is_space(unsigned char c);

// ASCII alphanumerics and every non-ASCII byte count as word characters, so
// UTF-8 letters never act as word boundaries.
bool is_word_byte(unsigned char c);

std::string_view trim(std::string_view s);

// Collapses runs of ASCII whitespace (newlines included) to one space and trims.
std::string collapse_whitespace(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);
std::size_t count_tokens(std::string_view s);

std::string to_lower_ascii(std::string_view s);

// Byte offsets of every case-insensitive whole-word occurrence of `phrase`.
std::vector<std::size_t> find_whole_word(std::string_view haystack,
                                         std::string_view phrase);
bool contains_whole_word(std::string_view haystack, std::string_view phrase);

struct Utf8Repair {
  std::string text;
  std::size_t invalid_bytes = 0;
};

// Replaces every byte that is not part of a well-formed UTF-8 sequence with
// U+FFFD.
Utf8Repair sanitize_utf8(std::string_view s);

// Decodes well-formed UTF-8; callers sanitize first.
std::vector<char32_t> decode_utf8(std::string_view s);

// 455733 -> "455,733"
std::string with_thousands(std::uint64_t n);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace stylepipe::text
