// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace stylepipe {

using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(std::string_view data);
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);
// Digest of the files' contents concatenated in the given order.
std::string sha256_files(std::span<const std::filesystem::path> paths);

std::string to_hex(const std::uint8_t* data, std::size_t n);

// First eight digest bytes, big-endian.
std::uint64_t hash64(std::string_view data);

// hash64 mapped onto [0, 1).
double unit_hash(std::string_view data);

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;

constexpr std::uint64_t fnv1a64(std::string_view s,
                                std::uint64_t h = kFnvOffset) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Joins fields with an unambiguous separator before hashing.
std::string key_of(std::initializer_list<std::string_view> fields);

}  // namespace stylepipe
