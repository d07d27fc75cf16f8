// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

// Little-endian primitives shared by the binary artifact formats.

#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "stylepipe/error.hpp"

namespace stylepipe::binio {

static_assert(std::endian::native == std::endian::little,
              "binary artifact formats assume a little-endian host");

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

inline void put_string(std::ostream& out, std::string_view s) {
  put(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T get(std::istream& in, const std::filesystem::path& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error("parse", "truncated file " + path.string());
  return v;
}

inline std::string get_string(std::istream& in, const std::filesystem::path& path) {
  auto n = get<std::uint32_t>(in, path);
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw Error("parse", "truncated file " + path.string());
  return s;
}

inline void expect_magic(std::istream& in, std::string_view magic,
                         const std::filesystem::path& path) {
  std::string got(magic.size(), '\0');
  in.read(got.data(), static_cast<std::streamsize>(got.size()));
  if (!in || got != magic) throw Error("parse", path.string() + ": bad magic");
}

}  // namespace stylepipe::binio
