// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

// Byte-exact contents of assets/templates/*.txt, embedded at build time.

#pragma once

#include <string_view>

namespace stylepipe::assets {

extern const std::string_view kTemplateI;
extern const std::string_view kTemplateII;
extern const std::string_view kTemplateIII;
extern const std::string_view kTermExtract;
extern const std::string_view kTermAlign;
extern const std::string_view kGuidance;

}  // namespace stylepipe::assets
