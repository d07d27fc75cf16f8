// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "stylepipe/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "binio.hpp"
#include "stylepipe/error.hpp"
#include "stylepipe/log.hpp"
#include "stylepipe/rng.hpp"

namespace stylepipe::eval {
namespace {

// log(1 + exp(t)) without overflow.
double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double accuracy(std::span<const kernels::SparseVector> x, std::span<const int> y,
                std::span<const double> w, double b) {
  if (x.empty()) return 0.0;
  auto m = kernels::linear_margins(x, w, b);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < m.size(); ++i) correct += (m[i] >= 0.0 ? 1 : 0) == y[i];
  return static_cast<double>(correct) / static_cast<double>(m.size());
}

}  // namespace

void TrainOptions::validate() const {
  if (max_epochs < 1) throw Error("config", "max_epochs must be positive");
  if (!(learning_rate > 0.0)) throw Error("config", "learning_rate must be positive");
  if (!(l2 >= 0.0)) throw Error("config", "l2 must be non-negative");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw Error("config", "validation_fraction must be in [0, 1)");
  }
  features.validate();
}

kernels::SparseVector classifier_features(std::string_view text,
                                          const features::NgramHashConfig& cfg) {
  auto v = features::ngram_counts(text, cfg);
  double norm = 0.0;
  std::vector<double> tf(v.nnz());
  for (std::size_t i = 0; i < v.nnz(); ++i) {
    tf[i] = 1.0 + std::log(static_cast<double>(v.value[i]));
    norm += tf[i] * tf[i];
  }
  norm = std::sqrt(norm);
  for (std::size_t i = 0; i < v.nnz(); ++i) v.value[i] = static_cast<float>(tf[i] / norm);
  return v;
}

double logistic_loss(std::span<const kernels::SparseVector> x, std::span<const int> y,
                     std::span<const double> w, double b, double l2,
                     std::span<const double> weights) {
  auto m = kernels::linear_margins(x, w, b);
  double loss = 0.0, total = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double c = weights.empty() ? 1.0 : weights[i];
    loss += c * softplus(y[i] ? -m[i] : m[i]);
    total += c;
  }
  if (total > 0.0) loss /= total;
  double sq = 0.0;
  for (double wi : w) sq += wi * wi;
  return loss + 0.5 * l2 * sq;
}

void logistic_gradient(std::span<const kernels::SparseVector> x, std::span<const int> y,
                       std::span<const double> w, double b, double l2,
                       std::vector<double>& grad_w, double& grad_b,
                       std::span<const double> weights) {
  auto m = kernels::linear_margins(x, w, b);
  grad_w.assign(w.size(), 0.0);
  grad_b = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) total += weights.empty() ? 1.0 : weights[i];
  const double inv_n = total > 0.0 ? 1.0 / total : 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double c = weights.empty() ? 1.0 : weights[i];
    const double r = c * (sigmoid(m[i]) - y[i]) * inv_n;
    grad_b += r;
    for (std::size_t t = 0; t < x[i].nnz(); ++t) {
      grad_w[x[i].index[t]] += r * static_cast<double>(x[i].value[t]);
    }
  }
  for (std::size_t j = 0; j < w.size(); ++j) grad_w[j] += l2 * w[j];
}

LinearClassifier::LinearClassifier(features::NgramHashConfig cfg, std::vector<double> weights,
                                   double bias)
    : cfg_(cfg), weights_(std::move(weights)), bias_(bias) {
  cfg_.validate();
  if (weights_.size() != cfg_.dim) throw Error("shape", "classifier weight count != feature dim");
  const bool finite = std::isfinite(bias_) &&
                      std::all_of(weights_.begin(), weights_.end(),
                                  [](double v) { return std::isfinite(v); });
  if (!finite) throw Error("numeric", "classifier weights must be finite");
}

LinearClassifier LinearClassifier::train(std::span<const std::string> in_domain,
                                         std::span<const std::string> out_domain,
                                         const TrainOptions& opt, TrainReport* report) {
  opt.validate();
  if (in_domain.empty() || out_domain.empty()) {
    throw Error("precondition", "classifier training needs both classes");
  }
  struct Example {
    const std::string* text;
    int label;
  };
  std::vector<Example> all;
  for (const auto& t : in_domain) all.push_back({&t, 1});
  for (const auto& t : out_domain) all.push_back({&t, 0});
  std::mt19937_64 rng(mix_seed(opt.seed, 0xc1a55));
  deterministic_shuffle(all, rng);

  const auto n_val = static_cast<std::size_t>(
      std::floor(opt.validation_fraction * static_cast<double>(all.size())));
  std::vector<kernels::SparseVector> xt, xv;
  std::vector<int> yt, yv;
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto f = classifier_features(*all[i].text, opt.features);
    if (i < n_val) {
      xv.push_back(std::move(f));
      yv.push_back(all[i].label);
    } else {
      xt.push_back(std::move(f));
      yt.push_back(all[i].label);
    }
  }

  std::vector<double> cw;
  if (opt.balance_classes) {
    const double pos = static_cast<double>(std::count(yt.begin(), yt.end(), 1));
    const double neg = static_cast<double>(yt.size()) - pos;
    for (int y : yt) {
      const double nc = y ? pos : neg;
      cw.push_back(nc > 0.0 ? static_cast<double>(yt.size()) / (2.0 * nc) : 0.0);
    }
  }
  std::vector<double> w(opt.features.dim, 0.0), gw;
  double b = 0.0, gb = 0.0;
  int epoch = 0;
  for (; epoch < opt.max_epochs; ++epoch) {
    logistic_gradient(xt, yt, w, b, opt.l2, gw, gb, cw);
    double gmax = std::abs(gb);
    for (double g : gw) gmax = std::max(gmax, std::abs(g));
    if (gmax < opt.tolerance) break;
    for (std::size_t j = 0; j < w.size(); ++j) w[j] -= opt.learning_rate * gw[j];
    b -= opt.learning_rate * gb;
  }
  TrainReport r;
  r.epochs = epoch;
  r.train_size = xt.size();
  r.validation_size = xv.size();
  r.final_loss = logistic_loss(xt, yt, w, b, opt.l2, cw);
  r.train_accuracy = accuracy(xt, yt, w, b);
  r.validation_accuracy = accuracy(xv, yv, w, b);
  spdlog::info("classifier: {} epochs, loss {:.4f}, train acc {:.3f}, validation acc {:.3f} (n={})",
               r.epochs, r.final_loss, r.train_accuracy, r.validation_accuracy, r.validation_size);
  if (report) *report = r;
  return LinearClassifier(opt.features, std::move(w), b);
}

std::vector<double> LinearClassifier::probabilities(std::span<const std::string> texts) const {
  std::vector<kernels::SparseVector> x(texts.size());
  const auto n = static_cast<std::int64_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < n; ++i) x[i] = classifier_features(texts[i], cfg_);
  auto m = kernels::linear_margins(x, weights_, bias_);
  for (double& v : m) v = sigmoid(v);
  return m;
}

std::vector<int> LinearClassifier::predict(std::span<const std::string> texts) const {
  auto p = probabilities(texts);
  std::vector<int> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] >= 0.5 ? 1 : 0;
  return out;
}

std::string LinearClassifier::fingerprint() const {
  return "builtin_linear/" + features::fingerprint(cfg_);
}

void LinearClassifier::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot write " + path.string());
  out.write("SPCLF001", 8);
  binio::put_string(out, fingerprint());
  binio::put(out, static_cast<std::uint32_t>(cfg_.min_n));
  binio::put(out, static_cast<std::uint32_t>(cfg_.max_n));
  binio::put(out, cfg_.dim);
  binio::put(out, static_cast<std::uint8_t>(cfg_.drop_stopwords));
  out.write(reinterpret_cast<const char*>(weights_.data()),
            static_cast<std::streamsize>(weights_.size() * sizeof(double)));
  binio::put(out, bias_);
  if (!out) throw Error("io", "short write to " + path.string());
}

LinearClassifier LinearClassifier::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot read " + path.string());
  binio::expect_magic(in, "SPCLF001", path);
  const auto fp = binio::get_string(in, path);
  features::NgramHashConfig cfg;
  cfg.min_n = static_cast<int>(binio::get<std::uint32_t>(in, path));
  cfg.max_n = static_cast<int>(binio::get<std::uint32_t>(in, path));
  cfg.dim = binio::get<std::uint32_t>(in, path);
  cfg.drop_stopwords = binio::get<std::uint8_t>(in, path) != 0;
  cfg.validate();
  std::vector<double> w(cfg.dim);
  in.read(reinterpret_cast<char*>(w.data()), static_cast<std::streamsize>(w.size() * sizeof(double)));
  if (!in) throw Error("parse", "truncated file " + path.string());
  const auto b = binio::get<double>(in, path);
  LinearClassifier clf(cfg, std::move(w), b);
  if (clf.fingerprint() != fp) throw Error("fingerprint_mismatch", path.string() + ": header fingerprint differs");
  return clf;
}

HttpClassifier::HttpClassifier(std::string endpoint, http::ClientOptions options)
    : endpoint_(std::move(endpoint)), options_(std::move(options)) {
  http::parse_url(endpoint_);
}

std::vector<int> HttpClassifier::predict(std::span<const std::string> texts) const {
  Json body{{"texts", Json::array()}};
  for (const auto& t : texts) body["texts"].push_back(t);
  auto resp = http::post_json(endpoint_, body, options_);
  if (resp.status != 200) {
    throw Error("backend", "classifier service returned status " + std::to_string(resp.status));
  }
  auto j = Json::parse(resp.body, nullptr, false);
  if (j.is_discarded() || !j.contains("labels") || !j["labels"].is_array() ||
      j["labels"].size() != texts.size()) {
    throw Error("backend", "classifier service returned a malformed response");
  }
  std::vector<int> out;
  for (const auto& v : j["labels"]) {
    const int label = v.get<int>();
    if (label != 0 && label != 1) throw Error("backend", "classifier label outside {0,1}");
    out.push_back(label);
  }
  return out;
}

std::string HttpClassifier::fingerprint() const { return "http_service/" + endpoint_; }

double style_accuracy(std::span<const std::string> generations, const StyleClassifier& clf) {
  if (generations.empty()) return 0.0;
  auto labels = clf.predict(generations);
  const auto hits = std::accumulate(labels.begin(), labels.end(), std::size_t{0});
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace stylepipe::eval
