// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stylepipe/dataset.hpp"
#include "stylepipe/features.hpp"
#include "stylepipe/http.hpp"

namespace stylepipe::retrieval {

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dim() const = 0;
  virtual std::string fingerprint() const = 0;

  // Unit-L2 vector of length dim(). Throws Error("zero_vector") when the text
  // yields no features.
  virtual std::vector<float> embed(std::string_view text) const = 0;

  // One vector per text; texts without features map to an empty vector.
  virtual std::vector<std::vector<float>> embed_many(
      std::span<const std::string> texts) const;
};

// Hashed character 3-5-gram TF-IDF (sublinear tf, smoothed idf), L2-normalized.
// Without fit() every idf weight is 1.
class HashedTfidfEmbedder final : public Embedder {
 public:
  explicit HashedTfidfEmbedder(features::NgramHashConfig cfg = {});

  void fit(std::span<const std::string> corpus);

  std::size_t dim() const override { return cfg_.dim; }
  std::string fingerprint() const override;
  std::vector<float> embed(std::string_view text) const override;
  std::vector<std::vector<float>> embed_many(
      std::span<const std::string> texts) const override;

  const features::NgramHashConfig& config() const { return cfg_; }
  const std::vector<float>& idf() const { return idf_; }

  void save(const std::filesystem::path& path) const;
  static HashedTfidfEmbedder load(const std::filesystem::path& path);

 private:
  std::vector<float> weigh(std::string_view text) const;

  features::NgramHashConfig cfg_;
  std::vector<float> idf_;
  std::uint64_t documents_ = 0;
};

// Remote embedding service: POST {"model","texts"} -> {"vectors":[[...]]}.
class HttpEmbedder final : public Embedder {
 public:
  HttpEmbedder(std::string endpoint, std::string model_tag, std::size_t dim,
               http::ClientOptions options = {});

  std::size_t dim() const override { return dim_; }
  std::string fingerprint() const override;
  std::vector<float> embed(std::string_view text) const override;
  std::vector<std::vector<float>> embed_many(
      std::span<const std::string> texts) const override;

 private:
  std::string endpoint_;
  std::string model_tag_;
  std::size_t dim_;
  http::ClientOptions options_;
};

double cosine(std::span<const float> a, std::span<const float> b);

// Flat exact index of unit vectors.
class VectorIndex {
 public:
  VectorIndex(std::size_t dim, std::string fingerprint);

  // Throws on dimension mismatch, duplicate id, or non-unit vector.
  void add(std::string id, std::span<const float> vec);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::string& fingerprint() const { return fingerprint_; }
  const std::vector<std::string>& ids() const { return ids_; }
  std::span<const float> data() const { return data_; }
  std::span<const float> row(std::size_t i) const;
  std::optional<std::size_t> find(std::string_view id) const;

  // Binary layout (little-endian): "SPIDX001", u32 dim, u64 count,
  // u32 fingerprint length, fingerprint bytes, count x (u32 length, id bytes),
  // count x dim float32 row-major.
  void save(const std::filesystem::path& path) const;
  static VectorIndex load(const std::filesystem::path& path,
                          std::string_view expected_fingerprint);

 private:
  std::size_t dim_;
  std::string fingerprint_;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

struct Neighbor {
  std::size_t row;
  double score;
};

// Exact top-k by cosine, ties broken by ascending id; `exclude_id` is skipped.
std::vector<Neighbor> knn(const VectorIndex& index, std::span<const float> query,
                          std::size_t k,
                          std::optional<std::string_view> exclude_id = std::nullopt);

enum class QueryKind { target_side, sketch, random };
std::string_view to_string(QueryKind k);

struct Shot {
  dataset::PseudoPair pair;
  double score = 0.0;
};

struct ShotSet {
  std::vector<Shot> shots;  // non-increasing score
  std::size_t k = 0;
  QueryKind query_kind = QueryKind::random;

  std::vector<std::string> ids() const;
  Json to_json() const;
};

class Retriever {
 public:
  Retriever(std::shared_ptr<const Embedder> embedder, VectorIndex index,
            std::vector<dataset::PseudoPair> pairs);

  // Indexes the target side of every pair. Pairs whose target has no
  // features are left out of the index.
  static Retriever build(std::shared_ptr<const Embedder> embedder,
                         std::vector<dataset::PseudoPair> pairs);

  ShotSet train_shots(const dataset::PseudoPair& pair, std::size_t k) const;
  ShotSet random_shots(std::uint64_t seed, std::size_t k,
                       std::optional<std::string_view> exclude_id = std::nullopt) const;
  ShotSet sketch_shots(std::string_view sketch, std::size_t k) const;

  const VectorIndex& index() const { return index_; }
  const Embedder& embedder() const { return *embedder_; }

 private:
  ShotSet from_neighbors(const std::vector<Neighbor>& nn, std::size_t k,
                         QueryKind kind) const;

  std::shared_ptr<const Embedder> embedder_;
  VectorIndex index_;
  std::unordered_map<std::string, dataset::PseudoPair> pairs_;
};

}  // namespace stylepipe::retrieval
