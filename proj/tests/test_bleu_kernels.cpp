// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "stylepipe/bleu.hpp"
#include "stylepipe/error.hpp"
#include "stylepipe/kernels.hpp"

namespace sp = stylepipe;
using sp::eval::corpus_bleu;

namespace {

std::vector<std::string> random_corpus(std::mt19937_64& rng, std::size_t n, std::size_t vocab,
                                       std::size_t min_len = 3, std::size_t max_len = 20) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = min_len + rng() % (max_len - min_len + 1);
    std::string s;
    for (std::size_t j = 0; j < len; ++j) s += (j ? " v" : "v") + std::to_string(rng() % vocab);
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST(Tokenizer, PunctuationAndNumbers) {
  using V = std::vector<std::string>;
  EXPECT_EQ(sp::eval::tokenize_13a("Hello, world!"), (V{"Hello", ",", "world", "!"}));
  EXPECT_EQ(sp::eval::tokenize_13a("It costs $3.50, or 1,000 yen."),
            (V{"It", "costs", "$", "3.50", ",", "or", "1,000", "yen", "."}));
  EXPECT_EQ(sp::eval::tokenize_13a("pages 5-6 and x-ray"), (V{"pages", "5", "-", "6", "and", "x-ray"}));
  EXPECT_EQ(sp::eval::tokenize_13a("(a) \"b\" [c]"), (V{"(", "a", ")", "\"", "b", "\"", "[", "c", "]"}));
  EXPECT_EQ(sp::eval::tokenize_13a("it's"), (V{"it's"}));
  EXPECT_TRUE(sp::eval::tokenize_13a("   ").empty());
}

TEST(Bleu, CatMatHandComputed) {
  // p1..p4 = 5/6, 3/5, 1/4, 0/3: no 4-gram match, so unsmoothed BLEU is 0.
  std::vector<std::string> h = {"the cat sat on the mat"}, r = {"the cat is on the mat"};
  EXPECT_EQ(corpus_bleu(h, r), 0.0);
  // Add-one on orders above 1: 5/6, 4/6, 2/5, 1/4, product 1/18.
  EXPECT_NEAR(sp::eval::sentence_bleu(h[0], r[0]), 100.0 * std::pow(1.0 / 18.0, 0.25), 1e-9);
  // Trigram BLEU: p = 5/6, 3/5, 1/4 -> product 1/8.
  sp::eval::BleuConfig c3;
  c3.max_order = 3;
  EXPECT_NEAR(corpus_bleu(h, r, c3), 100.0 * std::cbrt(1.0 / 8.0), 1e-9);
}

TEST(Bleu, BrevityPenalty) {
  // h = 3, r = 6, all n-grams match: BLEU = 100 exp(1 - 2).
  std::vector<std::string> h = {"a b c"}, r = {"a b c d e f"};
  sp::eval::BleuConfig c;
  c.max_order = 3;
  EXPECT_NEAR(corpus_bleu(h, r, c), 100.0 * std::exp(-1.0), 1e-9);
}

TEST(Bleu, IdentityAndDisjoint) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    auto c = random_corpus(rng, 1 + rng() % 30, 50);
    EXPECT_EQ(corpus_bleu(c, c), 100.0);
  }
  std::vector<std::string> h = {"alpha beta"}, r = {"gamma delta"};
  EXPECT_EQ(corpus_bleu(h, r), 0.0);
}

TEST(Bleu, EmptyHypothesisHandling) {
  std::vector<std::string> h = {""}, r = {"x y"};
  EXPECT_EQ(corpus_bleu(h, r), 0.0);
  std::vector<std::string> e = {""};
  EXPECT_EQ(corpus_bleu(e, e), 100.0);
}

TEST(Bleu, ShortSegmentsUseAvailableOrders) {
  // Only unigrams and bigrams exist anywhere: the mean is over two orders.
  std::vector<std::string> h = {"a b", "c d"}, r = {"a b", "c e"};
  EXPECT_NEAR(corpus_bleu(h, r), oracle::bleu(h, r), 1e-12);
  EXPECT_NEAR(corpus_bleu(h, r), 100.0 * std::sqrt(3.0 / 4.0 * 1.0 / 2.0), 1e-9);
}

TEST(Bleu, Preconditions) {
  std::vector<std::string> one = {"a"}, two = {"a", "b"}, none;
  EXPECT_THROW(corpus_bleu(one, two), sp::Error);
  EXPECT_THROW(corpus_bleu(none, none), sp::Error);
  sp::eval::BleuConfig bad;
  bad.max_order = 0;
  EXPECT_THROW(bad.validate(), sp::Error);
}

TEST(Bleu, CaseSensitivityIsConfigurable) {
  std::vector<std::string> h = {"The Cat sat down"}, r = {"the cat sat down"};
  sp::eval::BleuConfig ci;
  ci.case_sensitive = false;
  EXPECT_EQ(corpus_bleu(h, r, ci), 100.0);
  EXPECT_LT(corpus_bleu(h, r), 100.0);
  EXPECT_EQ(sp::eval::BleuConfig{}.fingerprint(), "bleu/n4/cased/tok13a/smooth-none");
}

TEST(BleuProperty, MatchesOracleOnRandomCorpora) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 40; ++t) {
    auto r = random_corpus(rng, 1 + rng() % 40, 4 + rng() % 6, 1, 25);
    auto h = random_corpus(rng, r.size(), 4 + rng() % 6, 1, 25);
    EXPECT_NEAR(corpus_bleu(h, r), oracle::bleu(h, r), 1e-9) << "trial " << t;
  }
}

TEST(BleuProperty, PermutationInvariant) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    auto r = random_corpus(rng, 30, 6);
    auto h = random_corpus(rng, 30, 6);
    std::vector<std::size_t> perm(30);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::string> hp, rp;
    for (auto i : perm) {
      hp.push_back(h[i]);
      rp.push_back(r[i]);
    }
    EXPECT_EQ(corpus_bleu(h, r), corpus_bleu(hp, rp));
  }
}

// Appending an unmatched token never raises the score while hypotheses are
// at least as long as their references (BP stays 1). With shorter
// hypotheses the brevity penalty can rise faster than precision falls.
TEST(BleuProperty, AppendingUnmatchedTokenNeverIncreases) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    auto r = random_corpus(rng, 10, 5, 3, 12);
    std::vector<std::string> h;
    for (const auto& ref : r) h.push_back(ref + (rng() % 2 ? " v1" : ""));
    for (int step = 0; step < 5; ++step) {
      auto longer = h;
      for (auto& s : longer) s += " zzz";
      EXPECT_LE(corpus_bleu(longer, r), corpus_bleu(h, r) + 1e-12);
      h = longer;
    }
  }
  // The counterexample outside that regime.
  std::vector<std::string> shortest = {"v1 v2 v3 v4"};
  std::string ref;
  for (int i = 0; i < 100; ++i) ref += (i ? " v" : "v") + std::to_string(1 + i % 4);
  std::vector<std::string> refs = {ref}, appended = {"v1 v2 v3 v4 zzz"};
  EXPECT_GT(corpus_bleu(appended, refs), corpus_bleu(shortest, refs));
}

TEST(Bleu, SmoothingOnlyLiftsHigherOrders) {
  sp::eval::BleuConfig s;
  s.smoothing = sp::eval::Smoothing::add_k;
  std::vector<std::string> h = {"x y"}, r = {"p q"};
  EXPECT_EQ(corpus_bleu(h, r, s), 0.0);  // unigram precision stays 0
}

// ----- kernels: OpenMP against the serial reference -----

TEST(Kernels, ScoreRowsMatchSerial) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> u(-1, 1);
  const std::size_t dim = 37, n = 513;
  std::vector<float> rows(n * dim), q(dim);
  for (auto& x : rows) x = u(rng);
  for (auto& x : q) x = rng() % 3 ? 0.0f : u(rng);
  for (int threads : {1, 2, 4}) {
    sp::kernels::set_threads(threads);
    EXPECT_EQ(sp::kernels::score_rows(rows, dim, q), sp::kernels::serial::score_rows(rows, dim, q));
  }
  sp::kernels::set_threads(0);
}

TEST(Kernels, NgramStatsMatchSerialAndSegmentSum) {
  std::mt19937_64 rng(6);
  std::vector<sp::kernels::TokenSeq> h, r;
  for (int i = 0; i < 300; ++i) {
    sp::kernels::TokenSeq a, b;
    for (std::size_t j = 0; j < 1 + rng() % 20; ++j) a.push_back(std::to_string(rng() % 5));
    for (std::size_t j = 0; j < 1 + rng() % 20; ++j) b.push_back(std::to_string(rng() % 5));
    h.push_back(a);
    r.push_back(b);
  }
  sp::kernels::NgramStats sum;
  for (std::size_t i = 0; i < h.size(); ++i) sum += sp::kernels::segment_ngram_stats(h[i], r[i], 4);
  for (int threads : {1, 3}) {
    sp::kernels::set_threads(threads);
    EXPECT_EQ(sp::kernels::corpus_ngram_stats(h, r, 4), sp::kernels::serial::corpus_ngram_stats(h, r, 4));
    EXPECT_EQ(sp::kernels::corpus_ngram_stats(h, r, 4), sum);
  }
  sp::kernels::set_threads(0);
}

TEST(Kernels, ClippedCounts) {
  auto s = sp::kernels::segment_ngram_stats({"the", "the", "the"}, {"the", "cat"}, 2);
  EXPECT_EQ(s.matches[0], 1u);
  EXPECT_EQ(s.totals[0], 3u);
  EXPECT_EQ(s.matches[1], 0u);
  EXPECT_EQ(s.totals[1], 2u);
  EXPECT_EQ(s.hyp_len, 3u);
  EXPECT_EQ(s.ref_len, 2u);
}

TEST(Kernels, LinearMarginsMatchSerial) {
  std::mt19937_64 rng(7);
  std::vector<sp::kernels::SparseVector> rows(200);
  for (auto& v : rows) {
    for (std::uint32_t j = 0; j < 64; ++j) {
      if (rng() % 4 == 0) {
        v.index.push_back(j);
        v.value.push_back(static_cast<float>(rng() % 100) / 50.0f - 1.0f);
      }
    }
  }
  std::vector<double> w(64);
  for (auto& x : w) x = static_cast<double>(rng() % 1000) / 500.0 - 1.0;
  for (int threads : {1, 4}) {
    sp::kernels::set_threads(threads);
    EXPECT_EQ(sp::kernels::linear_margins(rows, w, 0.25), sp::kernels::serial::linear_margins(rows, w, 0.25));
  }
  sp::kernels::set_threads(0);
}
