// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "stylepipe/log.hpp"

#include <string>

#include "stylepipe/error.hpp"

namespace stylepipe {

void set_log_level(std::string_view level) {
  auto lvl = spdlog::level::from_str(std::string(level));
  if (lvl == spdlog::level::off && level != "off") {
    throw Error("config", "unknown log level: " + std::string(level));
  }
  spdlog::set_level(lvl);
}

}  // namespace stylepipe
