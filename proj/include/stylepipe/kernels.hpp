// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

// Data-parallel inner loops. Each kernel has an OpenMP implementation and a
// plain serial reference in `serial::`; both produce bit-identical results
// because every output element is computed by exactly one thread in a fixed
// order, and cross-segment reductions only sum integers.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace stylepipe::kernels {

struct SparseVector {
  std::vector<std::uint32_t> index;  // strictly increasing
  std::vector<float> value;

  std::size_t nnz() const { return index.size(); }
  bool operator==(const SparseVector&) const = default;
};

// Dot products of `query` with every row of a row-major `rows` matrix
// (n_rows x dim), accumulated in double over the query's nonzeros in
// ascending column order.
std::vector<double> score_rows(std::span<const float> rows, std::size_t dim,
                               std::span<const float> query);

constexpr int kMaxBleuOrder = 8;

struct NgramStats {
  std::array<std::uint64_t, kMaxBleuOrder> matches{};
  std::array<std::uint64_t, kMaxBleuOrder> totals{};
  std::uint64_t hyp_len = 0;
  std::uint64_t ref_len = 0;

  NgramStats& operator+=(const NgramStats& o);
  bool operator==(const NgramStats&) const = default;
};

using TokenSeq = std::vector<std::string>;

// Clipped n-gram matches and hypothesis n-gram totals for one segment.
NgramStats segment_ngram_stats(const TokenSeq& hyp, const TokenSeq& ref,
                               int max_order);

NgramStats corpus_ngram_stats(std::span<const TokenSeq> hyps,
                              std::span<const TokenSeq> refs, int max_order);

// bias + <weights, x_i> for every sparse row.
std::vector<double> linear_margins(std::span<const SparseVector> rows,
                                   std::span<const double> weights, double bias);

namespace serial {

std::vector<double> score_rows(std::span<const float> rows, std::size_t dim,
                               std::span<const float> query);
NgramStats corpus_ngram_stats(std::span<const TokenSeq> hyps,
                              std::span<const TokenSeq> refs, int max_order);
std::vector<double> linear_margins(std::span<const SparseVector> rows,
                                   std::span<const double> weights, double bias);

}  // namespace serial

// Sets the OpenMP thread count used by the kernels (0 keeps the runtime default).
void set_threads(int n);
int max_threads();

}  // namespace stylepipe::kernels
