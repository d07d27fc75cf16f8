// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "http_server.hpp"
#include "stylepipe/error.hpp"
#include "stylepipe/mt.hpp"

namespace sp = stylepipe;
using sp::mt::BackendKind;

namespace {

sp::mt::GatewayOptions fast_options() {
  sp::mt::GatewayOptions go;
  go.retry.base_delay = std::chrono::milliseconds(1);
  go.batch_size = 8;
  return go;
}

std::unique_ptr<sp::mt::Gateway> identity_gateway(std::shared_ptr<sp::mt::TranslationCache> cache = nullptr) {
  auto gw = std::make_unique<sp::mt::Gateway>(fast_options(), std::move(cache));
  gw->add_backend(sp::mt::make_backend(fixtures::mt_spec("f", BackendKind::mock_identity, "en", "zh")));
  gw->add_backend(sp::mt::make_backend(fixtures::mt_spec("b", BackendKind::mock_identity, "zh", "en")));
  gw->add_route({"zh", "f", "b"});
  return gw;
}

class ThrowingBackend final : public sp::mt::MtBackend {
 public:
  using MtBackend::MtBackend;
  std::vector<std::string> translate_batch(std::span<const std::string>) override {
    throw sp::mt::BackendFailure("boom");
  }
};

}  // namespace

TEST(Mt, IdentityEchoes) {
  auto gw = identity_gateway();
  std::vector<std::string> in = {"hello"};
  auto out = gw->translate(in, "f");
  ASSERT_TRUE(out[0].ok());
  EXPECT_EQ(*out[0].text, "hello");
}

TEST(Mt, ScrambleIsDeterministic) {
  auto spec = fixtures::mt_spec("s", BackendKind::mock_scramble, "en", "zh");
  spec.seed = 7;
  auto a = sp::mt::make_backend(spec), b = sp::mt::make_backend(spec);
  std::vector<std::string> in = {"a b c"};
  EXPECT_EQ(a->translate_batch(in), a->translate_batch(in));
  EXPECT_EQ(a->translate_batch(in), b->translate_batch(in));
}

TEST(Mt, ScrambleInverseRecoversText) {
  auto spec = fixtures::mt_spec("s", BackendKind::mock_scramble, "en", "zh");
  spec.seed = 3;
  spec.synonyms = {{"big", "large"}, {"car", "automobile"}};
  sp::mt::ScrambleBackend fwd(spec);
  spec.inverse = true;
  sp::mt::ScrambleBackend inv(spec);
  for (std::string s : {"The big car, a large Automobile.", "big", "one two three four five six"}) {
    std::vector<std::string> in = {s};
    auto mid = fwd.translate_batch(in);
    EXPECT_EQ(inv.translate_batch(mid)[0], s);
  }
  EXPECT_EQ(fwd.forward("big"), "large");
  EXPECT_EQ(fwd.forward("Big!"), "Large!");
}

TEST(Mt, ScrambleRejectsConflictingSynonyms) {
  auto spec = fixtures::mt_spec("s", BackendKind::mock_scramble, "en", "zh");
  spec.synonyms = {{"a", "b"}, {"b", "c"}};
  EXPECT_THROW(sp::mt::ScrambleBackend{spec}, sp::Error);
  spec.synonyms = {{"Car", "automobile"}};
  EXPECT_THROW(sp::mt::ScrambleBackend{spec}, sp::Error);
}

TEST(Mt, SpecValidation) {
  auto spec = fixtures::mt_spec("h", BackendKind::http, "en", "zh");
  EXPECT_THROW(spec.validate(), sp::Error);  // http without endpoint
  auto same = fixtures::mt_spec("x", BackendKind::mock_identity, "en", "en");
  EXPECT_THROW(same.validate(), sp::Error);
}

TEST(Mt, RoundtripIdentityAndCallCount) {
  auto gw = identity_gateway();
  auto r = gw->roundtrip("The quick fox.", "zh");
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.neutral, "The quick fox.");
  EXPECT_EQ(r.pivot_lang, "zh");
  EXPECT_EQ(gw->total_calls(), 2u);
  gw->reset_counters();
  auto again = gw->roundtrip("The quick fox.", "zh");
  EXPECT_EQ(gw->total_calls(), 0u);
  EXPECT_TRUE(again.cache_hit.first && again.cache_hit.second);
}

TEST(Mt, UnknownPivotAndEmptyBatchRejected) {
  auto gw = identity_gateway();
  EXPECT_THROW(gw->roundtrip("x y", "de"), sp::Error);
  std::vector<std::string> none;
  EXPECT_THROW(gw->translate(none, "f"), sp::Error);
}

// 100 prior cache entries: the batch of 100 issues no backend call.
TEST(Mt, WarmCacheIssuesNoCalls) {
  auto cache = std::make_shared<sp::mt::TranslationCache>();
  std::vector<std::string> batch;
  for (int i = 0; i < 100; ++i) {
    batch.push_back("sentence " + std::to_string(i));
    cache->put(sp::mt::TranslationCache::key("f", "v1", batch.back()), "cached " + std::to_string(i));
  }
  auto gw = identity_gateway(cache);
  auto out = gw->translate(batch, "f");
  EXPECT_EQ(gw->counters("f").calls, 0u);
  for (int i = 0; i < 100; ++i) {
    EXPECT_TRUE(out[i].cache_hit);
    EXPECT_EQ(*out[i].text, "cached " + std::to_string(i));
  }
}

TEST(Mt, CachePersistsAcrossInstances) {
  fixtures::TempDir dir;
  {
    auto cache = std::make_shared<sp::mt::TranslationCache>(dir / "cache.jsonl");
    auto gw = identity_gateway(cache);
    gw->roundtrip("Persist me please.", "zh");
  }
  auto cache = std::make_shared<sp::mt::TranslationCache>(dir / "cache.jsonl");
  EXPECT_EQ(cache->size(), 2u);
  auto gw = identity_gateway(cache);
  gw->roundtrip("Persist me please.", "zh");
  EXPECT_EQ(gw->total_calls(), 0u);
}

TEST(Mt, CacheKeySeparatesBackendAndModel) {
  using C = sp::mt::TranslationCache;
  EXPECT_NE(C::key("a", "v1", "t"), C::key("b", "v1", "t"));
  EXPECT_NE(C::key("a", "v1", "t"), C::key("a", "v2", "t"));
  EXPECT_EQ(C::key("a", "v1", "t"), C::key("a", "v1", "t"));
}

TEST(Mt, DuplicatesInBatchTranslatedOnce) {
  auto gw = identity_gateway();
  std::vector<std::string> batch(20, "same text here");
  auto out = gw->translate(batch, "f");
  EXPECT_EQ(gw->counters("f").items, 1u);
  for (const auto& r : out) EXPECT_EQ(*r.text, "same text here");
}

// A failing backend marks items failed after retries; the batch completes.
TEST(Mt, FailuresNeverAbortTheBatch) {
  sp::mt::Gateway gw(fast_options());
  gw.add_backend(std::make_unique<ThrowingBackend>(fixtures::mt_spec("f", BackendKind::mock_identity, "en", "zh")));
  gw.add_backend(sp::mt::make_backend(fixtures::mt_spec("b", BackendKind::mock_identity, "zh", "en")));
  gw.add_route({"zh", "f", "b"});
  std::vector<std::string> texts;
  for (int i = 0; i < 20; ++i) texts.push_back("text number " + std::to_string(i));
  texts.push_back("   ");
  auto rts = gw.roundtrip_batch(texts, "zh");
  ASSERT_EQ(rts.size(), texts.size());
  std::size_t ok = 0, failed = 0;
  for (const auto& r : rts) (r.ok ? ok : failed)++;
  EXPECT_EQ(ok + failed, texts.size());
  EXPECT_EQ(failed, texts.size());
  EXPECT_EQ(rts[0].error_stage, "forward");
  // 3 chunks of 8, 3 attempts each.
  EXPECT_EQ(gw.counters("f").calls, 9u);
  EXPECT_EQ(gw.counters("b").calls, 0u);
}

TEST(Mt, RoundtripJsonRoundTrip) {
  auto gw = identity_gateway();
  auto r = gw->roundtrip("Serialize this one.", "zh");
  auto back = sp::mt::roundtrip_from_json(sp::mt::to_json(r));
  EXPECT_EQ(back.neutral, r.neutral);
  EXPECT_EQ(back.ok, r.ok);
  EXPECT_EQ(back.pivot_lang, r.pivot_lang);
}

TEST(MtHttp, WireContract) {
  sp::Json seen;
  fixtures::JsonServer server("/v1/translate", [&](const sp::Json& req) {
    seen = req;
    sp::Json out = sp::Json::array();
    for (const auto& t : req.at("texts")) out.push_back("[" + req.at("tgt").get<std::string>() + "] " + t.get<std::string>());
    return std::pair<int, sp::Json>{200, {{"translations", out}}};
  });
  auto spec = fixtures::mt_spec("h", BackendKind::http, "en", "de");
  spec.endpoint = server.url();
  sp::http::ClientOptions co;
  co.api_key = "secret";
  sp::mt::Gateway gw(fast_options());
  gw.add_backend(sp::mt::make_backend(spec, co));
  std::vector<std::string> in = {"one", "two"};
  auto out = gw.translate(in, "h");
  EXPECT_EQ(seen.at("src"), "en");
  EXPECT_EQ(seen.at("tgt"), "de");
  EXPECT_EQ(seen.at("texts"), sp::Json({"one", "two"}));
  EXPECT_EQ(*out[1].text, "[de] two");
  EXPECT_EQ(server.last_auth(), "Bearer secret");
}

TEST(MtHttp, Non200IsFailureAndRetried) {
  fixtures::JsonServer server("/t", [](const sp::Json&) {
    return std::pair<int, sp::Json>{503, {{"error", "busy"}}};
  });
  auto spec = fixtures::mt_spec("h", BackendKind::http, "en", "de");
  spec.endpoint = server.url();
  sp::mt::Gateway gw(fast_options());
  gw.add_backend(sp::mt::make_backend(spec));
  std::vector<std::string> in = {"one"};
  auto out = gw.translate(in, "h");
  EXPECT_FALSE(out[0].ok());
  EXPECT_EQ(server.requests(), 3);
}

TEST(MtHttp, MalformedResponseIsFailure) {
  fixtures::JsonServer server("/t", [](const sp::Json&) {
    return std::pair<int, sp::Json>{200, {{"translations", {"only one"}}}};
  });
  auto spec = fixtures::mt_spec("h", BackendKind::http, "en", "de");
  spec.endpoint = server.url();
  sp::mt::Gateway gw(fast_options());
  gw.add_backend(sp::mt::make_backend(spec));
  std::vector<std::string> in = {"one", "two"};
  auto out = gw.translate(in, "h");
  EXPECT_FALSE(out[0].ok());
  EXPECT_FALSE(out[1].ok());
}
