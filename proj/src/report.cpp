// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "stylepipe/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

#include "stylepipe/error.hpp"

namespace stylepipe::eval {
namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_cell(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string_view to_string(BleuMode m) { return m == BleuMode::source ? "source" : "reference"; }

BleuMode bleu_mode_from_string(std::string_view s) {
  if (s == "source") return BleuMode::source;
  if (s == "reference") return BleuMode::reference;
  throw Error("config", "unknown BLEU mode: " + std::string(s));
}

ReportRow evaluate_run(const SystemRun& run, const StyleClassifier& clf, const BleuConfig& cfg,
                       BleuMode mode) {
  const auto& refs = mode == BleuMode::source ? run.sources : run.references;
  if (run.hypotheses.size() != refs.size()) {
    throw Error("precondition", "run '" + run.method + "' has mismatched hypothesis/reference counts");
  }
  ReportRow row;
  row.method = run.method;
  row.domain = run.domain;
  row.fingerprint = run.fingerprint;
  row.n = run.hypotheses.size();
  if (row.n > 0) {
    row.bleu = corpus_bleu(run.hypotheses, refs, cfg);
    row.acc = style_accuracy(run.hypotheses, clf);
  }
  return row;
}

EvalReport build_report(std::vector<ReportRow> rows, const BleuConfig& cfg, BleuMode mode) {
  std::set<std::pair<std::string, std::string>> keys;
  std::set<std::string> domains, baseline_domains;
  std::map<std::string, std::size_t> method_rank;
  method_rank[std::string(kBaselineMethod)] = 0;
  for (const auto& r : rows) {
    if (!keys.insert({r.method, r.domain}).second) {
      throw Error("precondition", "duplicate report row (" + r.method + ", " + r.domain + ")");
    }
    if (!(r.bleu >= 0.0 && r.bleu <= 100.0) || !(r.acc >= 0.0 && r.acc <= 1.0)) {
      throw Error("precondition", "report row out of range: " + r.method + "/" + r.domain);
    }
    domains.insert(r.domain);
    if (r.method == kBaselineMethod) baseline_domains.insert(r.domain);
    method_rank.emplace(r.method, method_rank.size());
  }
  for (const auto& d : domains) {
    if (!baseline_domains.count(d)) {
      throw Error("precondition", "domain '" + d + "' lacks the baseline row");
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [&](const ReportRow& a, const ReportRow& b) {
    return method_rank[a.method] < method_rank[b.method];
  });
  return EvalReport{std::move(rows), cfg.fingerprint(), std::string(to_string(mode))};
}

Json EvalReport::to_json() const {
  Json j{{"bleu", bleu_fingerprint}, {"bleu_mode", bleu_mode}, {"rows", Json::array()}};
  for (const auto& r : rows) {
    j["rows"].push_back(Json{{"method", r.method},
                             {"domain", r.domain},
                             {"bleu", std::round(r.bleu * 1e4) / 1e4},
                             {"acc", std::round(r.acc * 1e4) / 1e4},
                             {"n", r.n},
                             {"fingerprint", r.fingerprint}});
  }
  return j;
}

EvalReport EvalReport::from_json(const Json& j) {
  EvalReport rep;
  rep.bleu_fingerprint = j.at("bleu").get<std::string>();
  rep.bleu_mode = j.at("bleu_mode").get<std::string>();
  for (const auto& r : j.at("rows")) {
    rep.rows.push_back(ReportRow{r.at("method").get<std::string>(), r.at("domain").get<std::string>(),
                                 r.at("bleu").get<double>(), r.at("acc").get<double>(),
                                 r.at("n").get<std::size_t>(), r.at("fingerprint").get<std::string>()});
  }
  return rep;
}

std::string EvalReport::to_csv() const {
  std::string out = "method,domain,bleu,acc,n,fingerprint\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{:.2f},{:.3f},{},{}\n", csv_field(r.method), csv_field(r.domain),
                       r.bleu, r.acc, r.n, csv_field(r.fingerprint));
  }
  return out;
}

std::string EvalReport::to_markdown() const {
  std::vector<std::string> domains, methods;
  for (const auto& r : rows) {
    if (std::find(domains.begin(), domains.end(), r.domain) == domains.end()) domains.push_back(r.domain);
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
  }
  std::sort(domains.begin(), domains.end());
  std::string out = "| Method |";
  std::string rule = "|---|";
  for (const auto& d : domains) {
    out += fmt::format(" {} BLEU | {} Acc |", md_cell(d), md_cell(d));
    rule += "---:|---:|";
  }
  out += "\n" + rule + "\n";
  for (const auto& m : methods) {
    out += "| " + md_cell(m) + " |";
    for (const auto& d : domains) {
      auto it = std::find_if(rows.begin(), rows.end(),
                             [&](const ReportRow& r) { return r.method == m && r.domain == d; });
      out += it == rows.end() ? " - | - |" : fmt::format(" {:.2f} | {:.3f} |", it->bleu, it->acc);
    }
    out += "\n";
  }
  out += "\nBLEU: " + bleu_fingerprint + " against " + bleu_mode + " text.\n";
  return out;
}

}  // namespace stylepipe::eval
