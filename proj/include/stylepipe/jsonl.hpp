// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace stylepipe {

using Json = nlohmann::json;

std::string read_file(const std::filesystem::path& path);

// Writes through a temporary sibling and renames into place.
void write_file(const std::filesystem::path& path, std::string_view content);

std::vector<Json> read_jsonl(const std::filesystem::path& path);

// Compact, key-sorted, UTF-8 preserving serialization used for every
// artifact so that byte-identical inputs give byte-identical files.
std::string dump_line(const Json& j);

class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path);
  ~JsonlWriter();
  JsonlWriter(const JsonlWriter&) = delete;
  JsonlWriter& operator=(const JsonlWriter&) = delete;
  void write(const Json& j);
  void close();
  std::size_t count() const { return count_; }

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
  std::size_t count_ = 0;
};

}  // namespace stylepipe
