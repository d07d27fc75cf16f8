// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

// OpenMP kernels against their serial references. Arg(0) is the serial
// path, Arg(1) the OpenMP path; the second range argument is the problem size.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "stylepipe/kernels.hpp"

namespace k = stylepipe::kernels;

namespace {

constexpr std::size_t kDim = 256;

std::vector<float> random_floats(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<k::TokenSeq> random_segments(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<k::TokenSeq> out(n);
  for (auto& seg : out) {
    seg.resize(10 + rng() % 20);
    for (auto& tok : seg) tok = "w" + std::to_string(rng() % 200);
  }
  return out;
}

std::vector<k::SparseVector> random_sparse(std::size_t n, std::uint32_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<k::SparseVector> out(n);
  for (auto& v : out) {
    for (std::uint32_t j = 0; j < dim; j += 1 + rng() % 64) {
      v.index.push_back(j);
      v.value.push_back(static_cast<float>(rng() % 1000) / 1000.0f);
    }
  }
  return out;
}

void BM_ScoreRows(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  const auto n = static_cast<std::size_t>(state.range(1));
  const auto rows = random_floats(n * kDim, 1);
  const auto query = random_floats(kDim, 2);
  for (auto _ : state) {
    auto s = parallel ? k::score_rows(rows, kDim, query) : k::serial::score_rows(rows, kDim, query);
    benchmark::DoNotOptimize(s.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

void BM_NgramStats(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  const auto n = static_cast<std::size_t>(state.range(1));
  const auto hyps = random_segments(n, 3);
  const auto refs = random_segments(n, 4);
  for (auto _ : state) {
    auto s = parallel ? k::corpus_ngram_stats(hyps, refs, 4) : k::serial::corpus_ngram_stats(hyps, refs, 4);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

void BM_LinearMargins(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  const auto n = static_cast<std::size_t>(state.range(1));
  constexpr std::uint32_t dim = 1u << 14;
  const auto rows = random_sparse(n, dim, 5);
  std::vector<double> w(dim, 0.01);
  for (auto _ : state) {
    auto m = parallel ? k::linear_margins(rows, w, 0.5) : k::serial::linear_margins(rows, w, 0.5);
    benchmark::DoNotOptimize(m.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

}  // namespace

BENCHMARK(BM_ScoreRows)->ArgsProduct({{0, 1}, {1000, 20000}})->ArgNames({"omp", "rows"});
BENCHMARK(BM_NgramStats)->ArgsProduct({{0, 1}, {500, 5000}})->ArgNames({"omp", "segments"});
BENCHMARK(BM_LinearMargins)->ArgsProduct({{0, 1}, {1000, 10000}})->ArgNames({"omp", "rows"});

BENCHMARK_MAIN();
