// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "stylepipe/kernels.hpp"

#include <algorithm>
#include <map>
#include <string_view>

#include <omp.h>

#include "stylepipe/error.hpp"

namespace stylepipe::kernels {
namespace {

struct QueryNonzeros {
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
};

QueryNonzeros gather(std::span<const float> query) {
  QueryNonzeros q;
  for (std::size_t c = 0; c < query.size(); ++c) {
    if (query[c] != 0.0f) {
      q.cols.push_back(static_cast<std::uint32_t>(c));
      q.vals.push_back(query[c]);
    }
  }
  return q;
}

double dot_row(const float* row, const QueryNonzeros& q) {
  double acc = 0.0;
  for (std::size_t t = 0; t < q.cols.size(); ++t) {
    acc += static_cast<double>(row[q.cols[t]]) * q.vals[t];
  }
  return acc;
}

void check_shape(std::span<const float> rows, std::size_t dim,
                 std::span<const float> query) {
  if (dim == 0 || query.size() != dim || rows.size() % dim != 0) {
    throw Error("shape", "score_rows: query/row dimension mismatch");
  }
}

// n-grams are keyed by their token range; comparison works on the tokens.
struct NgramKey {
  const std::string* first;
  int n;
  bool operator<(const NgramKey& o) const {
    if (n != o.n) return n < o.n;
    for (int i = 0; i < n; ++i) {
      int c = first[i].compare(o.first[i]);
      if (c != 0) return c < 0;
    }
    return false;
  }
};

void check_pairs(std::span<const TokenSeq> hyps, std::span<const TokenSeq> refs,
                 int max_order) {
  if (hyps.size() != refs.size()) {
    throw Error("shape", "hypothesis and reference counts differ");
  }
  if (max_order < 1 || max_order > kMaxBleuOrder) {
    throw Error("config", "BLEU max_order out of range");
  }
}

}  // namespace

NgramStats& NgramStats::operator+=(const NgramStats& o) {
  for (int n = 0; n < kMaxBleuOrder; ++n) {
    matches[n] += o.matches[n];
    totals[n] += o.totals[n];
  }
  hyp_len += o.hyp_len;
  ref_len += o.ref_len;
  return *this;
}

NgramStats segment_ngram_stats(const TokenSeq& hyp, const TokenSeq& ref,
                               int max_order) {
  NgramStats s;
  s.hyp_len = hyp.size();
  s.ref_len = ref.size();
  for (int n = 1; n <= max_order; ++n) {
    if (hyp.size() < static_cast<std::size_t>(n)) break;
    std::map<NgramKey, std::uint64_t> ref_counts;
    for (std::size_t i = 0; i + n <= ref.size(); ++i) ++ref_counts[{&ref[i], n}];
    std::map<NgramKey, std::uint64_t> hyp_counts;
    for (std::size_t i = 0; i + n <= hyp.size(); ++i) ++hyp_counts[{&hyp[i], n}];
    std::uint64_t matched = 0;
    for (const auto& [key, count] : hyp_counts) {
      auto it = ref_counts.find(key);
      if (it != ref_counts.end()) matched += std::min(count, it->second);
    }
    s.matches[n - 1] = matched;
    s.totals[n - 1] = hyp.size() - n + 1;
  }
  return s;
}

std::vector<double> score_rows(std::span<const float> rows, std::size_t dim,
                               std::span<const float> query) {
  check_shape(rows, dim, query);
  const QueryNonzeros q = gather(query);
  const auto n_rows = static_cast<std::int64_t>(rows.size() / dim);
  std::vector<double> out(static_cast<std::size_t>(n_rows));
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < n_rows; ++r) {
    out[r] = dot_row(rows.data() + r * dim, q);
  }
  return out;
}

NgramStats corpus_ngram_stats(std::span<const TokenSeq> hyps,
                              std::span<const TokenSeq> refs, int max_order) {
  check_pairs(hyps, refs, max_order);
  std::uint64_t matches[kMaxBleuOrder] = {};
  std::uint64_t totals[kMaxBleuOrder] = {};
  std::uint64_t hyp_len = 0, ref_len = 0;
  const auto n = static_cast<std::int64_t>(hyps.size());
#pragma omp parallel for schedule(dynamic, 16) \
    reduction(+ : matches[:kMaxBleuOrder], totals[:kMaxBleuOrder], hyp_len, ref_len)
  for (std::int64_t i = 0; i < n; ++i) {
    NgramStats s = segment_ngram_stats(hyps[i], refs[i], max_order);
    for (int k = 0; k < kMaxBleuOrder; ++k) {
      matches[k] += s.matches[k];
      totals[k] += s.totals[k];
    }
    hyp_len += s.hyp_len;
    ref_len += s.ref_len;
  }
  NgramStats total;
  std::copy(std::begin(matches), std::end(matches), total.matches.begin());
  std::copy(std::begin(totals), std::end(totals), total.totals.begin());
  total.hyp_len = hyp_len;
  total.ref_len = ref_len;
  return total;
}

namespace {

double margin_of(const SparseVector& x, std::span<const double> w, double bias) {
  double m = bias;
  for (std::size_t t = 0; t < x.index.size(); ++t) {
    m += w[x.index[t]] * static_cast<double>(x.value[t]);
  }
  return m;
}

}  // namespace

std::vector<double> linear_margins(std::span<const SparseVector> rows,
                                   std::span<const double> weights, double bias) {
  const auto n = static_cast<std::int64_t>(rows.size());
  std::vector<double> out(rows.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = margin_of(rows[i], weights, bias);
  return out;
}

namespace serial {

std::vector<double> score_rows(std::span<const float> rows, std::size_t dim,
                               std::span<const float> query) {
  check_shape(rows, dim, query);
  const QueryNonzeros q = gather(query);
  std::vector<double> out(rows.size() / dim);
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = dot_row(rows.data() + r * dim, q);
  return out;
}

NgramStats corpus_ngram_stats(std::span<const TokenSeq> hyps,
                              std::span<const TokenSeq> refs, int max_order) {
  check_pairs(hyps, refs, max_order);
  NgramStats total;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    total += segment_ngram_stats(hyps[i], refs[i], max_order);
  }
  return total;
}

std::vector<double> linear_margins(std::span<const SparseVector> rows,
                                   std::span<const double> weights, double bias) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& x : rows) out.push_back(margin_of(x, weights, bias));
  return out;
}

}  // namespace serial

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace stylepipe::kernels
