// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "stylepipe/dataset.hpp"

#include <algorithm>
#include <unordered_set>

#include "stylepipe/error.hpp"
#include "stylepipe/hash.hpp"
#include "stylepipe/log.hpp"
#include "stylepipe/text.hpp"

namespace stylepipe::dataset {

bool PseudoPair::has_flag(std::string_view f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

std::string filter_reason(const PseudoPair& p, const PairPolicy& policy) {
  const auto n = static_cast<double>(text::count_tokens(p.neutral));
  const auto t = static_cast<double>(text::count_tokens(p.target));
  if (n < static_cast<double>(policy.min_neutral_tokens)) return "neutral_too_short";
  if (n < policy.min_ratio * t || n > policy.max_ratio * t) return "length_ratio";
  return {};
}

std::vector<PseudoPair> filter_pairs(std::vector<PseudoPair> pairs,
                                     const PairPolicy& policy, DropLog* drops) {
  std::vector<PseudoPair> kept;
  kept.reserve(pairs.size());
  for (auto& p : pairs) {
    std::string reason = filter_reason(p, policy);
    if (reason.empty()) {
      kept.push_back(std::move(p));
    } else if (drops) {
      drops->emplace_back(p.id, std::move(reason));
    }
  }
  return kept;
}

Json BuildReport::to_json() const {
  Json d = Json::array();
  for (const auto& [id, reason] : drops) d.push_back({{"id", id}, {"reason", reason}});
  return Json{{"records", records},         {"roundtrip_failed", roundtrip_failed},
              {"filtered", filtered},       {"pairs", pairs},
              {"trivial", trivial},         {"failure_rate", failure_rate},
              {"degraded", degraded},       {"drops", d}};
}

BuildResult assemble_pairs(const std::vector<corpus::CorpusRecord>& records,
                           const std::vector<mt::RoundtripResult>& roundtrips,
                           const PairPolicy& policy, double degraded_threshold) {
  if (records.size() != roundtrips.size()) {
    throw Error("precondition", "assemble_pairs: record/roundtrip count mismatch");
  }
  BuildResult out;
  auto& rep = out.report;
  rep.records = records.size();
  std::vector<PseudoPair> candidates;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rt = roundtrips[i];
    if (!rt.ok || text::trim(rt.neutral).empty()) {
      ++rep.roundtrip_failed;
      rep.drops.emplace_back(records[i].id,
                             "roundtrip_failed:" + (rt.error_stage.empty() ? std::string("empty") : rt.error_stage));
      continue;
    }
    PseudoPair p;
    p.id = records[i].id;
    p.neutral = text::collapse_whitespace(rt.neutral);
    p.target = records[i].text;
    p.pivot_lang = rt.pivot_lang;
    p.domain = records[i].domain;
    if (p.neutral == p.target) p.flags.emplace_back(kTrivialPair);
    candidates.push_back(std::move(p));
  }
  std::size_t before = candidates.size();
  out.pairs = filter_pairs(std::move(candidates), policy, &rep.drops);
  rep.filtered = before - out.pairs.size();
  std::sort(out.pairs.begin(), out.pairs.end(),
            [](const PseudoPair& a, const PseudoPair& b) { return a.id < b.id; });
  rep.pairs = out.pairs.size();
  rep.trivial = static_cast<std::size_t>(std::count_if(
      out.pairs.begin(), out.pairs.end(),
      [](const PseudoPair& p) { return p.has_flag(kTrivialPair); }));
  rep.failure_rate = rep.records == 0 ? 0.0
                                      : static_cast<double>(rep.roundtrip_failed) /
                                            static_cast<double>(rep.records);
  rep.degraded = rep.failure_rate > degraded_threshold;
  if (rep.degraded) {
    spdlog::warn("build_pairs: roundtrip failure rate {:.3f} exceeds {:.2f}; run degraded",
                 rep.failure_rate, degraded_threshold);
  }
  return out;
}

BuildResult build_pairs(const std::vector<corpus::CorpusRecord>& records,
                        mt::Gateway& gateway, const std::string& pivot,
                        const PairPolicy& policy) {
  std::vector<std::string> texts;
  texts.reserve(records.size());
  for (const auto& r : records) texts.push_back(r.text);
  auto rts = gateway.roundtrip_batch(texts, pivot);
  return assemble_pairs(records, rts, policy);
}

Json DatasetSplit::to_json() const {
  return Json{{"train", train}, {"heldout_classifier", heldout_classifier}, {"test", test}};
}

DatasetSplit DatasetSplit::from_json(const Json& j) {
  DatasetSplit s;
  s.train = j.at("train").get<std::vector<std::string>>();
  s.heldout_classifier = j.at("heldout_classifier").get<std::vector<std::string>>();
  s.test = j.at("test").get<std::vector<std::string>>();
  return s;
}

SplitZone zone_of(std::string_view record_id, double heldout_fraction) {
  double u = unit_hash(record_id);
  if (u < heldout_fraction) return SplitZone::heldout;
  if (u < 2.0 * heldout_fraction) return SplitZone::test;
  return SplitZone::train;
}

DatasetSplit split(const std::vector<PseudoPair>& pairs,
                   const std::vector<corpus::CorpusRecord>& records,
                   const corpus::StyleDomain& domain) {
  domain.validate();
  std::unordered_set<std::string_view> paired;
  for (const auto& p : pairs) paired.insert(p.id);
  DatasetSplit s;
  for (const auto& r : records) {
    switch (zone_of(r.id, domain.heldout_fraction)) {
      case SplitZone::heldout: s.heldout_classifier.push_back(r.id); break;
      case SplitZone::test: s.test.push_back(r.id); break;
      case SplitZone::train:
        if (paired.count(r.id)) {
          s.train.push_back(r.id);
        } else {
          s.heldout_classifier.push_back(r.id);
        }
        break;
    }
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.heldout_classifier.begin(), s.heldout_classifier.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

Json to_json(const PseudoPair& p) {
  return Json{{"id", p.id},         {"neutral", p.neutral}, {"target", p.target},
              {"pivot_lang", p.pivot_lang}, {"domain", p.domain}, {"flags", p.flags}};
}

PseudoPair pair_from_json(const Json& j) {
  PseudoPair p;
  p.id = j.at("id").get<std::string>();
  p.neutral = j.at("neutral").get<std::string>();
  p.target = j.at("target").get<std::string>();
  p.pivot_lang = j.value("pivot_lang", "");
  p.domain = j.value("domain", "");
  if (j.contains("flags")) p.flags = j["flags"].get<std::vector<std::string>>();
  return p;
}

void write_pairs(const std::filesystem::path& path, const std::vector<PseudoPair>& pairs) {
  JsonlWriter w(path);
  for (const auto& p : pairs) w.write(to_json(p));
  w.close();
}

std::vector<PseudoPair> read_pairs(const std::filesystem::path& path) {
  std::vector<PseudoPair> out;
  for (const auto& j : read_jsonl(path)) out.push_back(pair_from_json(j));
  return out;
}

}  // namespace stylepipe::dataset
