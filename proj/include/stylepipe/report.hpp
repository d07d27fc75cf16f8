// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "stylepipe/bleu.hpp"
#include "stylepipe/classifier.hpp"
#include "stylepipe/jsonl.hpp"

namespace stylepipe::eval {

inline constexpr std::string_view kBaselineMethod = "RT output (no transfer)";

enum class BleuMode { source, reference };
std::string_view to_string(BleuMode m);
BleuMode bleu_mode_from_string(std::string_view s);

// One system's outputs for one domain. `sources` are the original in-style
// inputs; `references` are only used in reference mode.
struct SystemRun {
  std::string method;
  std::string domain;
  std::string fingerprint;
  std::vector<std::string> hypotheses;
  std::vector<std::string> sources;
  std::vector<std::string> references;
};

struct ReportRow {
  std::string method;
  std::string domain;
  double bleu = 0.0;  // [0, 100]
  double acc = 0.0;   // [0, 1]
  std::size_t n = 0;
  std::string fingerprint;

  bool operator==(const ReportRow&) const = default;
};

ReportRow evaluate_run(const SystemRun& run, const StyleClassifier& clf,
                       const BleuConfig& cfg, BleuMode mode = BleuMode::source);

struct EvalReport {
  std::vector<ReportRow> rows;  // baseline first, then methods in first-seen order
  std::string bleu_fingerprint;
  std::string bleu_mode;

  Json to_json() const;
  static EvalReport from_json(const Json& j);
  std::string to_csv() const;
  std::string to_markdown() const;
};

// Throws Error("precondition") on a duplicate (method, domain), a value out
// of range, or a domain without the baseline row.
EvalReport build_report(std::vector<ReportRow> rows, const BleuConfig& cfg, BleuMode mode);

}  // namespace stylepipe::eval
