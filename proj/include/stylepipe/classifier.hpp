// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stylepipe/features.hpp"
#include "stylepipe/http.hpp"
#include "stylepipe/kernels.hpp"

namespace stylepipe::eval {

// Label 1 = in-domain.
class StyleClassifier {
 public:
  virtual ~StyleClassifier() = default;
  virtual std::vector<int> predict(std::span<const std::string> texts) const = 0;
  virtual std::string fingerprint() const = 0;
};

struct TrainOptions {
  int max_epochs = 200;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  double validation_fraction = 0.2;
  double tolerance = 1e-6;  // stop when the max |gradient| drops below
  std::uint64_t seed = 0;
  // Weights each class by n / (2 n_c) so the minority class is not ignored.
  bool balance_classes = true;
  features::NgramHashConfig features{3, 5, 1u << 14, false};

  void validate() const;
};

struct TrainReport {
  double train_accuracy = 0.0;
  double validation_accuracy = 0.0;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
  int epochs = 0;
  double final_loss = 0.0;
};

// Sublinear tf over hashed character n-grams, L2-normalized. Empty when the
// text has no features.
kernels::SparseVector classifier_features(std::string_view text,
                                          const features::NgramHashConfig& cfg);

// Weighted mean logistic loss over labels y in {0,1} plus (l2/2)|w|^2; bias
// unpenalized. Empty `weights` means uniform.
double logistic_loss(std::span<const kernels::SparseVector> x, std::span<const int> y,
                     std::span<const double> w, double b, double l2,
                     std::span<const double> weights = {});

void logistic_gradient(std::span<const kernels::SparseVector> x, std::span<const int> y,
                       std::span<const double> w, double b, double l2,
                       std::vector<double>& grad_w, double& grad_b,
                       std::span<const double> weights = {});

class LinearClassifier final : public StyleClassifier {
 public:
  LinearClassifier(features::NgramHashConfig cfg, std::vector<double> weights, double bias);

  // Throws Error("precondition") when either class is empty.
  static LinearClassifier train(std::span<const std::string> in_domain,
                                std::span<const std::string> out_domain,
                                const TrainOptions& options, TrainReport* report = nullptr);

  std::vector<int> predict(std::span<const std::string> texts) const override;
  std::vector<double> probabilities(std::span<const std::string> texts) const;
  std::string fingerprint() const override;

  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }

  // Binary: "SPCLF001", fingerprint, u32 min_n, u32 max_n, u32 dim,
  // u8 drop_stopwords, dim x f64 weights, f64 bias.
  void save(const std::filesystem::path& path) const;
  static LinearClassifier load(const std::filesystem::path& path);

 private:
  features::NgramHashConfig cfg_;
  std::vector<double> weights_;
  double bias_;
};

// POST {"texts":[...]} -> {"labels":[0|1,...]}.
class HttpClassifier final : public StyleClassifier {
 public:
  HttpClassifier(std::string endpoint, http::ClientOptions options = {});
  std::vector<int> predict(std::span<const std::string> texts) const override;
  std::string fingerprint() const override;

 private:
  std::string endpoint_;
  http::ClientOptions options_;
};

// Fraction of texts labelled in-domain; 0 for no texts.
double style_accuracy(std::span<const std::string> generations, const StyleClassifier& clf);

}  // namespace stylepipe::eval
