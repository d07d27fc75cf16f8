// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include <spdlog/spdlog.h>

namespace stylepipe {

// Accepts spdlog level names ("trace", "debug", "info", "warn", "error", "off").
void set_log_level(std::string_view level);

}  // namespace stylepipe
