// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "stylepipe/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "binio.hpp"
#include "stylepipe/error.hpp"
#include "stylepipe/hash.hpp"
#include "stylepipe/kernels.hpp"
#include "stylepipe/log.hpp"
#include "stylepipe/rng.hpp"

namespace stylepipe::retrieval {

namespace {

using binio::expect_magic;
using binio::get;
using binio::get_string;
using binio::put;
using binio::put_string;

std::vector<float> normalized(const std::vector<double>& v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm == 0.0) return {};
  norm = std::sqrt(norm);
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] / norm);
  return out;
}

}  // namespace

std::vector<std::vector<float>> Embedder::embed_many(
    std::span<const std::string> texts) const {
  std::vector<std::vector<float>> out(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    try {
      out[i] = embed(texts[i]);
    } catch (const Error& e) {
      if (e.code() != "zero_vector") throw;
    }
  }
  return out;
}

HashedTfidfEmbedder::HashedTfidfEmbedder(features::NgramHashConfig cfg) : cfg_(cfg) {
  cfg_.validate();
}

void HashedTfidfEmbedder::fit(std::span<const std::string> corpus) {
  std::vector<std::uint64_t> df(cfg_.dim, 0);
  for (const auto& doc : corpus) {
    for (std::uint32_t b : features::ngram_counts(doc, cfg_).index) ++df[b];
  }
  documents_ = corpus.size();
  idf_.assign(cfg_.dim, 0.0f);
  const double n = static_cast<double>(documents_);
  for (std::size_t b = 0; b < cfg_.dim; ++b) {
    idf_[b] = static_cast<float>(std::log((1.0 + n) / (1.0 + static_cast<double>(df[b]))) + 1.0);
  }
}

std::string HashedTfidfEmbedder::fingerprint() const {
  std::string fp = "hashed_tfidf/" + features::fingerprint(cfg_) + "/idf=";
  if (idf_.empty()) return fp + "none";
  std::string_view bytes(reinterpret_cast<const char*>(idf_.data()),
                         idf_.size() * sizeof(float));
  return fp + sha256_hex(bytes).substr(0, 16);
}

std::vector<float> HashedTfidfEmbedder::weigh(std::string_view text) const {
  auto counts = features::ngram_counts(text, cfg_);
  std::vector<double> dense(cfg_.dim, 0.0);
  for (std::size_t t = 0; t < counts.nnz(); ++t) {
    double tf = 1.0 + std::log(static_cast<double>(counts.value[t]));
    double idf = idf_.empty() ? 1.0 : static_cast<double>(idf_[counts.index[t]]);
    dense[counts.index[t]] = tf * idf;
  }
  return normalized(dense);
}

std::vector<float> HashedTfidfEmbedder::embed(std::string_view text) const {
  auto v = weigh(text);
  if (v.empty()) throw Error("zero_vector", "text has no features: \"" + std::string(text) + "\"");
  return v;
}

std::vector<std::vector<float>> HashedTfidfEmbedder::embed_many(
    std::span<const std::string> texts) const {
  std::vector<std::vector<float>> out(texts.size());
  const auto n = static_cast<std::int64_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < n; ++i) out[i] = weigh(texts[i]);
  return out;
}

void HashedTfidfEmbedder::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot write " + path.string());
  out.write("SPEMB001", 8);
  put(out, static_cast<std::uint32_t>(cfg_.min_n));
  put(out, static_cast<std::uint32_t>(cfg_.max_n));
  put(out, cfg_.dim);
  put(out, static_cast<std::uint8_t>(cfg_.drop_stopwords));
  put(out, documents_);
  put(out, static_cast<std::uint32_t>(idf_.size()));
  out.write(reinterpret_cast<const char*>(idf_.data()),
            static_cast<std::streamsize>(idf_.size() * sizeof(float)));
  if (!out) throw Error("io", "short write to " + path.string());
}

HashedTfidfEmbedder HashedTfidfEmbedder::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot read " + path.string());
  expect_magic(in, "SPEMB001", path);
  features::NgramHashConfig cfg;
  cfg.min_n = static_cast<int>(get<std::uint32_t>(in, path));
  cfg.max_n = static_cast<int>(get<std::uint32_t>(in, path));
  cfg.dim = get<std::uint32_t>(in, path);
  cfg.drop_stopwords = get<std::uint8_t>(in, path) != 0;
  HashedTfidfEmbedder e(cfg);
  e.documents_ = get<std::uint64_t>(in, path);
  auto n = get<std::uint32_t>(in, path);
  if (n != 0 && n != cfg.dim) throw Error("parse", path.string() + ": idf length mismatch");
  e.idf_.resize(n);
  in.read(reinterpret_cast<char*>(e.idf_.data()), static_cast<std::streamsize>(n * sizeof(float)));
  if (!in) throw Error("parse", "truncated file " + path.string());
  return e;
}

HttpEmbedder::HttpEmbedder(std::string endpoint, std::string model_tag, std::size_t dim,
                           http::ClientOptions options)
    : endpoint_(std::move(endpoint)),
      model_tag_(std::move(model_tag)),
      dim_(dim),
      options_(std::move(options)) {
  if (dim_ == 0) throw Error("config", "embedder dim must be positive");
}

std::string HttpEmbedder::fingerprint() const {
  return "http_service/" + endpoint_ + "/" + model_tag_ + "/dim" + std::to_string(dim_);
}

std::vector<std::vector<float>> HttpEmbedder::embed_many(
    std::span<const std::string> texts) const {
  Json body{{"model", model_tag_},
            {"texts", std::vector<std::string>(texts.begin(), texts.end())}};
  auto res = http::post_json(endpoint_, body, options_);
  if (res.status != 200) {
    throw Error("backend", "embedding service failed: " +
                               (res.status ? "HTTP " + std::to_string(res.status) : res.error));
  }
  Json parsed = Json::parse(res.body, nullptr, false);
  if (parsed.is_discarded() || !parsed.contains("vectors") ||
      parsed["vectors"].size() != texts.size()) {
    throw Error("backend", "embedding service returned a malformed response");
  }
  std::vector<std::vector<float>> out;
  for (const auto& row : parsed["vectors"]) {
    auto v = row.get<std::vector<double>>();
    if (v.size() != dim_) throw Error("backend", "embedding has the wrong dimension");
    out.push_back(normalized(v));
  }
  return out;
}

std::vector<float> HttpEmbedder::embed(std::string_view text) const {
  std::string t(text);
  auto v = embed_many(std::span<const std::string>(&t, 1)).front();
  if (v.empty()) throw Error("zero_vector", "embedding service returned a zero vector");
  return v;
}

double cosine(std::span<const float> a, std::span<const float> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

VectorIndex::VectorIndex(std::size_t dim, std::string fingerprint)
    : dim_(dim), fingerprint_(std::move(fingerprint)) {
  if (dim_ == 0) throw Error("config", "index dimension must be positive");
}

void VectorIndex::add(std::string id, std::span<const float> vec) {
  if (vec.size() != dim_) throw Error("shape", "vector dimension mismatch for " + id);
  double norm = 0.0;
  for (float x : vec) norm += static_cast<double>(x) * x;
  if (norm == 0.0) throw Error("zero_vector", "zero vector rejected for " + id);
  if (std::abs(std::sqrt(norm) - 1.0) > 1e-3) {
    throw Error("shape", "vector for " + id + " is not unit-normalized");
  }
  if (by_id_.count(id)) throw Error("duplicate", "duplicate index id " + id);
  by_id_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  data_.insert(data_.end(), vec.begin(), vec.end());
}

std::span<const float> VectorIndex::row(std::size_t i) const {
  return std::span<const float>(data_).subspan(i * dim_, dim_);
}

std::optional<std::size_t> VectorIndex::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

void VectorIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot write " + path.string());
  out.write("SPIDX001", 8);
  put(out, static_cast<std::uint32_t>(dim_));
  put(out, static_cast<std::uint64_t>(ids_.size()));
  put_string(out, fingerprint_);
  for (const auto& id : ids_) put_string(out, id);
  out.write(reinterpret_cast<const char*>(data_.data()),
            static_cast<std::streamsize>(data_.size() * sizeof(float)));
  if (!out) throw Error("io", "short write to " + path.string());
}

VectorIndex VectorIndex::load(const std::filesystem::path& path,
                              std::string_view expected_fingerprint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot read " + path.string());
  expect_magic(in, "SPIDX001", path);
  auto dim = get<std::uint32_t>(in, path);
  auto count = get<std::uint64_t>(in, path);
  auto fp = get_string(in, path);
  if (fp != expected_fingerprint) {
    throw Error("fingerprint_mismatch", path.string() + ": index built with embedder '" +
                                            fp + "', expected '" +
                                            std::string(expected_fingerprint) + "'");
  }
  VectorIndex index(dim, fp);
  index.ids_.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    index.ids_.push_back(get_string(in, path));
    index.by_id_.emplace(index.ids_.back(), i);
  }
  index.data_.resize(count * dim);
  in.read(reinterpret_cast<char*>(index.data_.data()),
          static_cast<std::streamsize>(index.data_.size() * sizeof(float)));
  if (!in) throw Error("parse", "truncated file " + path.string());
  return index;
}

std::vector<Neighbor> knn(const VectorIndex& index, std::span<const float> query,
                          std::size_t k, std::optional<std::string_view> exclude_id) {
  if (k == 0) throw Error("precondition", "knn: k must be at least 1");
  if (index.empty()) throw Error("empty_index", "knn: index is empty");
  auto scores = kernels::score_rows(index.data(), index.dim(), query);
  std::vector<std::size_t> rows;
  rows.reserve(scores.size());
  const auto& ids = index.ids();
  for (std::size_t r = 0; r < scores.size(); ++r) {
    if (exclude_id && ids[r] == *exclude_id) continue;
    rows.push_back(r);
  }
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids[a] < ids[b];
  };
  std::size_t take = std::min(k, rows.size());
  std::partial_sort(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(take),
                    rows.end(), better);
  std::vector<Neighbor> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back({rows[i], scores[rows[i]]});
  return out;
}

std::string_view to_string(QueryKind k) {
  switch (k) {
    case QueryKind::target_side: return "target_side";
    case QueryKind::sketch: return "sketch";
    case QueryKind::random: return "random";
  }
  return "unknown";
}

std::vector<std::string> ShotSet::ids() const {
  std::vector<std::string> out;
  for (const auto& s : shots) out.push_back(s.pair.id);
  return out;
}

Json ShotSet::to_json() const {
  Json shots_json = Json::array();
  for (const auto& s : shots) shots_json.push_back({{"id", s.pair.id}, {"score", s.score}});
  return Json{{"k", k}, {"query_kind", std::string(to_string(query_kind))}, {"shots", shots_json}};
}

Retriever::Retriever(std::shared_ptr<const Embedder> embedder, VectorIndex index,
                     std::vector<dataset::PseudoPair> pairs)
    : embedder_(std::move(embedder)), index_(std::move(index)) {
  if (index_.fingerprint() != embedder_->fingerprint()) {
    throw Error("fingerprint_mismatch", "index and embedder fingerprints differ");
  }
  for (auto& p : pairs) {
    if (index_.find(p.id)) pairs_.emplace(p.id, std::move(p));
  }
  if (pairs_.size() != index_.size()) {
    throw Error("precondition", "index holds ids without a matching pair");
  }
}

Retriever Retriever::build(std::shared_ptr<const Embedder> embedder,
                           std::vector<dataset::PseudoPair> pairs) {
  std::vector<std::string> targets;
  targets.reserve(pairs.size());
  for (const auto& p : pairs) targets.push_back(p.target);
  auto vecs = embedder->embed_many(targets);
  VectorIndex index(embedder->dim(), embedder->fingerprint());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (vecs[i].empty()) {
      spdlog::warn("index: pair {} has no features; left out", pairs[i].id);
      continue;
    }
    index.add(pairs[i].id, vecs[i]);
  }
  return Retriever(std::move(embedder), std::move(index), std::move(pairs));
}

ShotSet Retriever::from_neighbors(const std::vector<Neighbor>& nn, std::size_t k,
                                  QueryKind kind) const {
  ShotSet set;
  set.k = k;
  set.query_kind = kind;
  for (const auto& n : nn) {
    set.shots.push_back({pairs_.at(index_.ids()[n.row]), n.score});
  }
  return set;
}

ShotSet Retriever::train_shots(const dataset::PseudoPair& pair, std::size_t k) const {
  auto q = embedder_->embed(pair.target);
  return from_neighbors(knn(index_, q, k, pair.id), k, QueryKind::target_side);
}

ShotSet Retriever::random_shots(std::uint64_t seed, std::size_t k,
                                std::optional<std::string_view> exclude_id) const {
  ShotSet set;
  set.k = k;
  set.query_kind = QueryKind::random;
  if (index_.empty() || k == 0) return set;
  std::optional<std::size_t> skip = exclude_id ? index_.find(*exclude_id) : std::nullopt;
  std::size_t pool = index_.size() - (skip ? 1 : 0);
  for (std::size_t pick : sample_without_replacement(pool, k, seed)) {
    std::size_t row = (skip && pick >= *skip) ? pick + 1 : pick;
    set.shots.push_back({pairs_.at(index_.ids()[row]), 0.0});
  }
  return set;
}

ShotSet Retriever::sketch_shots(std::string_view sketch, std::size_t k) const {
  auto q = embedder_->embed(sketch);
  return from_neighbors(knn(index_, q, k), k, QueryKind::sketch);
}

}  // namespace stylepipe::retrieval
