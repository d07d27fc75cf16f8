// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "stylepipe/corpus.hpp"
#include "stylepipe/dataset.hpp"
#include "stylepipe/error.hpp"
#include "stylepipe/mt.hpp"
#include "stylepipe/text.hpp"

namespace sp = stylepipe;
using sp::corpus::CorpusRecord;
using sp::corpus::InputFormat;
using sp::corpus::StyleDomain;

namespace {

const StyleDomain kDomain{"irs", "tax prose", 0.1};

std::vector<CorpusRecord> ingest_text(const std::string& text, const std::string& src = "doc.txt") {
  return sp::corpus::ingest_bytes(text, InputFormat::plain_text, src, kDomain).records;
}

std::string random_words(std::mt19937_64& rng, std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ' ';
    const std::size_t len = 2 + rng() % 6;
    for (std::size_t j = 0; j < len; ++j) s += static_cast<char>('a' + rng() % 26);
  }
  return s;
}

}  // namespace

TEST(Text, WholeWordMatchIsCaseInsensitiveAndBounded) {
  EXPECT_EQ(sp::text::find_whole_word("The art of Art", "art"), (std::vector<std::size_t>{4, 11}));
  EXPECT_TRUE(sp::text::find_whole_word("a particle", "art").empty());
  EXPECT_EQ(sp::text::collapse_whitespace("  a \n\t b  "), "a b");
  EXPECT_EQ(sp::text::with_thousands(455733), "455,733");
}

TEST(Text, Utf8RepairCountsInvalidBytes) {
  auto r = sp::text::sanitize_utf8(std::string("ok\xff\xfe!"));
  EXPECT_EQ(r.invalid_bytes, 2u);
  EXPECT_EQ(r.text, "ok\xEF\xBF\xBD\xEF\xBF\xBD!");
}

TEST(Corpus, SplitsOnTerminalPunctuation) {
  auto recs = ingest_text("A. B.");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].text, "A.");
  EXPECT_EQ(recs[1].text, "B.");
}

TEST(Corpus, AbbreviationsDoNotSplit) {
  auto recs = ingest_text("Dr. Smith moved to the U.S. last year. He likes it, e.g. the food.");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].text, "Dr. Smith moved to the U.S. last year.");
}

TEST(Corpus, WordCountAndStatsRow) {
  auto r = sp::corpus::ingest_bytes("One two three four five six seven.", InputFormat::plain_text,
                                    "x.txt", kDomain);
  EXPECT_EQ(r.stats.sentences, 1u);
  EXPECT_EQ(r.stats.words, 7u);
  EXPECT_EQ(r.stats.table_row("irs"), "irs\ten monolingual\t1\t7");
}

TEST(Corpus, JsonlInput) {
  auto r = sp::corpus::ingest_bytes("{\"text\":\"First one here. Second one here.\"}\n",
                                    InputFormat::jsonl, "x.jsonl", kDomain);
  EXPECT_EQ(r.records.size(), 2u);
}

TEST(Corpus, SegmentationIsDeterministic) {
  const std::string doc = "It rained. Then it\nstopped!\n\nNew paragraph here? Yes.";
  auto a = ingest_text(doc), b = ingest_text(doc);
  EXPECT_EQ(a, b);
  std::set<std::string> ids;
  for (const auto& r : a) {
    EXPECT_TRUE(ids.insert(r.id).second);
    EXPECT_EQ(r.text.find('\n'), std::string::npos);
    EXPECT_EQ(std::string(sp::text::trim(r.text)), r.text);
  }
}

TEST(Corpus, CleanDropsShortAndDuplicates) {
  auto recs = ingest_text("Hello. The same sentence again. The same sentence again.");
  auto res = sp::corpus::clean(recs, {});
  ASSERT_EQ(res.kept.size(), 1u);
  EXPECT_EQ(res.kept[0].text, "The same sentence again.");
  ASSERT_EQ(res.drops.size(), 2u);
  EXPECT_EQ(res.drops[0].reason, sp::corpus::DropReason::too_short);
  EXPECT_EQ(res.drops[1].reason, sp::corpus::DropReason::duplicate);
}

TEST(Corpus, CleanDropsNonText) {
  auto recs = ingest_text("12 34 56 78 99 00 11 %%.");
  EXPECT_TRUE(sp::corpus::clean(recs, {}).kept.empty());
}

// 1,000 random lines, 10% exact duplicates: 900 survive.
TEST(Corpus, DedupCountMatchesSetSize) {
  std::mt19937_64 rng(3);
  std::vector<CorpusRecord> recs;
  std::vector<std::string> uniq;
  for (int i = 0; i < 900; ++i) uniq.push_back(random_words(rng, 5 + rng() % 5));
  for (int i = 0; i < 1000; ++i) {
    const std::string& t = i < 900 ? uniq[i] : uniq[rng() % 900];
    recs.push_back({"r" + std::to_string(i), t, "irs", "x:" + std::to_string(i)});
  }
  std::set<std::string> distinct;
  for (const auto& r : recs) distinct.insert(r.text);
  auto kept = sp::corpus::clean(recs, {}).kept;
  EXPECT_EQ(kept.size(), distinct.size());
  EXPECT_EQ(kept.size(), 900u);
}

TEST(Corpus, CleanIsIdempotent) {
  std::mt19937_64 rng(4);
  std::vector<CorpusRecord> recs;
  for (int i = 0; i < 300; ++i) {
    recs.push_back({"r" + std::to_string(i), random_words(rng, 1 + rng() % 10), "irs", "x"});
    if (i % 7 == 0) recs.push_back({"d" + std::to_string(i), recs.back().text, "irs", "x"});
  }
  auto once = sp::corpus::clean(recs, {}).kept;
  auto twice = sp::corpus::clean(once, {}).kept;
  EXPECT_EQ(once, twice);
}

TEST(Corpus, DomainValidation) {
  EXPECT_THROW((StyleDomain{"", "", 0.1}.validate()), sp::Error);
  EXPECT_THROW((StyleDomain{"x", "", 0.5}.validate()), sp::Error);
  EXPECT_NO_THROW((StyleDomain{"x", "", 0.49}.validate()));
}

TEST(Corpus, JsonRoundTrip) {
  fixtures::TempDir dir;
  auto recs = ingest_text("Alpha beta gamma delta. Epsilon zeta eta theta.");
  sp::corpus::write_corpus(dir / "c.jsonl", recs);
  EXPECT_EQ(sp::corpus::read_corpus(dir / "c.jsonl"), recs);
}

// ----- dataset -----

namespace {

sp::dataset::PseudoPair pair_of(std::size_t neutral_tokens, std::size_t target_tokens) {
  sp::dataset::PseudoPair p;
  p.id = "p";
  for (std::size_t i = 0; i < neutral_tokens; ++i) p.neutral += (i ? " n" : "n");
  for (std::size_t i = 0; i < target_tokens; ++i) p.target += (i ? " t" : "t");
  return p;
}

// Returns "" for every text in `fail`, echoes the rest.
class FailingBackend final : public sp::mt::MtBackend {
 public:
  FailingBackend(sp::mt::MtBackendSpec spec, std::set<std::string> fail)
      : MtBackend(std::move(spec)), fail_(std::move(fail)) {}
  std::vector<std::string> translate_batch(std::span<const std::string> texts) override {
    std::vector<std::string> out;
    for (const auto& t : texts) out.push_back(fail_.count(t) ? "" : t);
    return out;
  }

 private:
  std::set<std::string> fail_;
};

}  // namespace

TEST(Dataset, LengthRatioBoundaries) {
  EXPECT_FALSE(sp::dataset::filter_reason(pair_of(4, 10), {}).empty());
  EXPECT_TRUE(sp::dataset::filter_reason(pair_of(5, 10), {}).empty());
  EXPECT_TRUE(sp::dataset::filter_reason(pair_of(20, 10), {}).empty());
  EXPECT_FALSE(sp::dataset::filter_reason(pair_of(21, 10), {}).empty());
}

TEST(Dataset, IdentityPipelineFlagsTrivialPair) {
  auto gw = std::make_unique<sp::mt::Gateway>();
  gw->add_backend(sp::mt::make_backend(
      fixtures::mt_spec("f", sp::mt::BackendKind::mock_identity, "en", "zh")));
  gw->add_backend(sp::mt::make_backend(
      fixtures::mt_spec("b", sp::mt::BackendKind::mock_identity, "zh", "en")));
  gw->add_route({"zh", "f", "b"});
  std::vector<CorpusRecord> recs = {{"x1", "X marks the spot.", "irs", "s:0"}};
  auto built = sp::dataset::build_pairs(recs, *gw, "zh");
  ASSERT_EQ(built.pairs.size(), 1u);
  EXPECT_EQ(built.pairs[0].neutral, "X marks the spot.");
  EXPECT_EQ(built.pairs[0].target, "X marks the spot.");
  EXPECT_TRUE(built.pairs[0].has_flag(sp::dataset::kTrivialPair));
}

// 1,000 records, 50 injected roundtrip failures: 950 pairs, not degraded.
TEST(Dataset, InjectedFailuresAreCountedNotFatal) {
  std::mt19937_64 rng(8);
  std::vector<CorpusRecord> recs;
  std::set<std::string> fail;
  for (int i = 0; i < 1000; ++i) {
    auto t = random_words(rng, 6) + " " + std::to_string(i) + ".";
    recs.push_back({"r" + std::to_string(10000 + i), t, "irs", "s:" + std::to_string(i)});
    if (i % 20 == 0) fail.insert(t);
  }
  sp::mt::GatewayOptions go;
  go.retry.base_delay = std::chrono::milliseconds(1);
  sp::mt::Gateway gw(go);
  gw.add_backend(std::make_unique<FailingBackend>(
      fixtures::mt_spec("f", sp::mt::BackendKind::mock_identity, "en", "zh"), fail));
  gw.add_backend(sp::mt::make_backend(
      fixtures::mt_spec("b", sp::mt::BackendKind::mock_identity, "zh", "en")));
  gw.add_route({"zh", "f", "b"});
  auto built = sp::dataset::build_pairs(recs, gw, "zh");
  EXPECT_EQ(built.report.roundtrip_failed, 50u);
  EXPECT_EQ(built.pairs.size(), 950u);
  EXPECT_FALSE(built.report.degraded);
  EXPECT_EQ(built.report.records, 1000u);
}

// 3% planted length outliers are exactly the dropped pairs.
TEST(Dataset, PlantedOutliersDropped) {
  std::mt19937_64 rng(9);
  std::vector<CorpusRecord> recs;
  std::vector<sp::mt::RoundtripResult> rts;
  std::set<std::string> planted;
  for (int i = 0; i < 1000; ++i) {
    CorpusRecord r{"r" + std::to_string(10000 + i), random_words(rng, 10), "irs", "s"};
    sp::mt::RoundtripResult rt;
    rt.original = r.text;
    rt.ok = true;
    rt.pivot_lang = "zh";
    rt.neutral = r.text;
    if (i % 33 == 5 && planted.size() < 30) {
      rt.neutral = random_words(rng, rng() % 2 ? 3 : 25);
      planted.insert(r.id);
    } else {
      rt.neutral = random_words(rng, 6 + rng() % 10);
    }
    recs.push_back(r);
    rts.push_back(rt);
  }
  ASSERT_EQ(planted.size(), 30u);
  auto built = sp::dataset::assemble_pairs(recs, rts);
  std::set<std::string> dropped;
  for (const auto& [id, why] : built.report.drops) dropped.insert(id);
  EXPECT_EQ(dropped, planted);
  for (const auto& p : built.pairs) {
    auto it = std::find_if(recs.begin(), recs.end(), [&](const auto& r) { return r.id == p.id; });
    ASSERT_NE(it, recs.end());
    EXPECT_EQ(p.target, it->text);  // target is the record verbatim
  }
}

TEST(Dataset, ReproducibleUnderFixedScrambleSeed) {
  auto make = [] {
    auto gw = std::make_unique<sp::mt::Gateway>();
    auto f = fixtures::mt_spec("f", sp::mt::BackendKind::mock_scramble, "en", "zh");
    f.seed = 7;
    f.synonyms = {{"cat", "feline"}};
    auto b = fixtures::mt_spec("b", sp::mt::BackendKind::mock_identity, "zh", "en");
    gw->add_backend(sp::mt::make_backend(f));
    gw->add_backend(sp::mt::make_backend(b));
    gw->add_route({"zh", "f", "b"});
    return gw;
  };
  std::vector<CorpusRecord> recs;
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) recs.push_back({"r" + std::to_string(i), random_words(rng, 8) + " cat", "irs", "s"});
  auto a = make(), b = make();
  EXPECT_EQ(sp::dataset::build_pairs(recs, *a, "zh").pairs, sp::dataset::build_pairs(recs, *b, "zh").pairs);
}

// Property: partitions are disjoint and cover every record, for random corpora.
TEST(Dataset, SplitPartitionProperty) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<CorpusRecord> recs;
    std::vector<sp::dataset::PseudoPair> pairs;
    const std::size_t n = 1 + rng() % 300;
    for (std::size_t i = 0; i < n; ++i) {
      CorpusRecord r{"t" + std::to_string(trial) + "-" + std::to_string(rng()), random_words(rng, 6), "irs", "s"};
      recs.push_back(r);
      if (rng() % 5) pairs.push_back({r.id, r.text, r.text, "zh", "irs", {}});
    }
    StyleDomain d{"irs", "", 0.05 + 0.4 * static_cast<double>(rng() % 100) / 100.0};
    auto s = sp::dataset::split(pairs, recs, d);
    std::set<std::string> all;
    std::size_t total = 0;
    for (const auto* part : {&s.train, &s.heldout_classifier, &s.test}) {
      total += part->size();
      all.insert(part->begin(), part->end());
    }
    EXPECT_EQ(total, all.size()) << "parts overlap";
    EXPECT_EQ(all.size(), recs.size()) << "parts do not cover the records";
    std::set<std::string> pair_ids;
    for (const auto& p : pairs) pair_ids.insert(p.id);
    for (const auto& id : s.train) EXPECT_TRUE(pair_ids.count(id));
  }
}

TEST(Dataset, PairsJsonRoundTrip) {
  fixtures::TempDir dir;
  std::vector<sp::dataset::PseudoPair> pairs = {{"a", "n a", "t a", "zh", "irs", {"trivial_pair"}},
                                                {"b", "n b", "t b", "de", "irs", {}}};
  sp::dataset::write_pairs(dir / "p.jsonl", pairs);
  EXPECT_EQ(sp::dataset::read_pairs(dir / "p.jsonl"), pairs);
}
