// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "stylepipe/pipeline.hpp"

#include <algorithm>
#include <unordered_map>

#include "stylepipe/classifier.hpp"
#include "stylepipe/corpus.hpp"
#include "stylepipe/dataset.hpp"
#include "stylepipe/emitter.hpp"
#include "stylepipe/error.hpp"
#include "stylepipe/hash.hpp"
#include "stylepipe/kernels.hpp"
#include "stylepipe/log.hpp"
#include "stylepipe/report.hpp"
#include "stylepipe/termbank.hpp"
#include "stylepipe/text.hpp"

namespace stylepipe::pipeline {
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = "corpus.jsonl";
const fs::path kIngestStats = "ingest.json";
const fs::path kRoundtrips = "rt.jsonl";
const fs::path kPairs = "pairs.jsonl";
const fs::path kSplit = "split.json";
const fs::path kDatasetReport = "dataset.json";
const fs::path kEmbedder = "embedder.bin";
const fs::path kIndex = "index.bin";
const fs::path kBank = "bank.jsonl";
const fs::path kData = "data";
const fs::path kTrainManifest = "train_manifest.json";
const fs::path kResults = "results";
const fs::path kClassifier = "classifier.bin";
const fs::path kEval = "eval.json";

struct DomainData {
  std::vector<corpus::CorpusRecord> records;
  std::unordered_map<std::string, std::size_t> by_id;
  dataset::DatasetSplit split;

  const corpus::CorpusRecord& record(const std::string& id) const {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw Error("consistency", "split names unknown record " + id);
    return records[it->second];
  }
  std::vector<std::string> texts(const std::vector<std::string>& ids) const {
    std::vector<std::string> out;
    for (const auto& id : ids) out.push_back(record(id).text);
    return out;
  }
};

DomainData load_domain(const fs::path& dir) {
  DomainData d;
  d.records = corpus::read_corpus(dir / kCorpus);
  for (std::size_t i = 0; i < d.records.size(); ++i) d.by_id[d.records[i].id] = i;
  d.split = dataset::DatasetSplit::from_json(Json::parse(read_file(dir / kSplit)));
  return d;
}

std::vector<dataset::PseudoPair> train_pairs(const fs::path& dir, const dataset::DatasetSplit& split) {
  auto pairs = dataset::read_pairs(dir / kPairs);
  std::vector<dataset::PseudoPair> out;
  for (auto& p : pairs) {
    if (std::binary_search(split.train.begin(), split.train.end(), p.id)) out.push_back(std::move(p));
  }
  return out;
}

std::unordered_map<std::string, mt::RoundtripResult> read_roundtrips(const fs::path& path) {
  std::unordered_map<std::string, mt::RoundtripResult> out;
  for (const auto& j : read_jsonl(path)) out.emplace(j.at("id").get<std::string>(), mt::roundtrip_from_json(j));
  return out;
}

std::shared_ptr<retrieval::Embedder> make_embedder(const config::RunConfig& cfg) {
  if (cfg.embedder.kind == "http") {
    return std::make_shared<retrieval::HttpEmbedder>(config::expand_env(cfg.embedder.endpoint),
                                                     cfg.embedder.model_tag,
                                                     static_cast<std::size_t>(cfg.embedder.dim),
                                                     cfg.client_options());
  }
  features::NgramHashConfig f;
  f.min_n = static_cast<int>(cfg.embedder.min_n);
  f.max_n = static_cast<int>(cfg.embedder.max_n);
  f.dim = static_cast<std::uint32_t>(cfg.embedder.dim);
  f.drop_stopwords = cfg.embedder.drop_stopwords;
  return std::make_shared<retrieval::HashedTfidfEmbedder>(f);
}

}  // namespace

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::ingest: return "ingest";
    case Stage::roundtrip: return "roundtrip";
    case Stage::build_dataset: return "build-dataset";
    case Stage::index: return "index";
    case Stage::termbank: return "termbank";
    case Stage::emit_ft: return "emit-ft";
    case Stage::infer: return "infer";
    case Stage::evaluate: return "evaluate";
    case Stage::report: return "report";
  }
  return "?";
}

Stage stage_from_string(std::string_view s) {
  for (auto st : all_stages()) {
    if (to_string(st) == s) return st;
  }
  throw Error("config", "unknown stage: " + std::string(s));
}

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> stages = {Stage::ingest,  Stage::roundtrip, Stage::build_dataset,
                                            Stage::index,   Stage::termbank,  Stage::emit_ft,
                                            Stage::infer,   Stage::evaluate,  Stage::report};
  return stages;
}

Json StageManifest::to_json() const {
  return Json{{"stage", stage},
              {"config_fingerprint", config_fingerprint},
              {"inputs", inputs},
              {"outputs", outputs},
              {"degraded", degraded}};
}

StageManifest StageManifest::from_json(const Json& j) {
  StageManifest m;
  m.stage = j.at("stage").get<std::string>();
  m.config_fingerprint = j.at("config_fingerprint").get<std::string>();
  m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
  m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
  m.degraded = j.value("degraded", false);
  return m;
}

Pipeline::Pipeline(config::RunConfig cfg, Options options)
    : cfg_(std::move(cfg)), options_(options), work_(cfg_.work_path()) {
  cfg_.validate();
  kernels::set_threads(static_cast<int>(cfg_.workers));
  fs::create_directories(work_ / "manifests");
}

Pipeline::~Pipeline() = default;

mt::Gateway& Pipeline::gateway() {
  if (!gateway_) {
    std::shared_ptr<mt::TranslationCache> cache;
    if (cfg_.mt.cache) {
      cache = std::make_shared<mt::TranslationCache>(work_ / "mt_cache.jsonl");
    } else {
      cache = std::make_shared<mt::TranslationCache>();
    }
    gateway_ = std::make_unique<mt::Gateway>(cfg_.gateway_options(), cache);
    for (const auto& spec : cfg_.mt_specs()) {
      gateway_->add_backend(mt::make_backend(spec, cfg_.client_options()));
    }
    for (const auto& r : cfg_.mt.routes) gateway_->add_route({r.pivot, r.forward, r.backward});
  }
  return *gateway_;
}

generation::Generator& Pipeline::generator() {
  if (!generator_) {
    http::RetryPolicy retry;
    retry.attempts = static_cast<int>(cfg_.mt.retry_attempts);
    retry.base_delay = std::chrono::milliseconds(cfg_.mt.retry_base_ms);
    generator_ = std::make_unique<generation::Generator>(
        generation::make_generation_backend(cfg_.generation_spec(), cfg_.client_options()), retry);
  }
  return *generator_;
}

std::vector<config::SystemConfig> Pipeline::systems() const {
  if (!cfg_.systems.empty()) return cfg_.systems;
  return {config::SystemConfig{"TST (rt-first, similar:5, terms)", "rt-first", "similar:5", true}};
}

std::string Pipeline::slug(std::string_view name) {
  std::string out;
  for (char c : name) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      out.push_back(static_cast<char>(std::tolower(u)));
    } else if (!out.empty() && out.back() != '-') {
      out.push_back('-');
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  if (out.empty()) throw Error("config", "system name has no usable characters: " + std::string(name));
  return out;
}

std::string Pipeline::rel(const fs::path& p) const {
  return p.lexically_relative(work_).generic_string();
}

fs::path Pipeline::manifest_path(Stage stage) const {
  return work_ / "manifests" / (std::string(to_string(stage)) + ".json");
}

std::optional<StageManifest> Pipeline::read_manifest(Stage stage) const {
  const auto p = manifest_path(stage);
  if (!fs::exists(p)) return std::nullopt;
  return StageManifest::from_json(Json::parse(read_file(p)));
}

Pipeline::Plan Pipeline::plan(Stage stage) const {
  Plan p;
  auto each = [&](std::initializer_list<fs::path> names) {
    for (const auto& d : cfg_.domains) {
      for (const auto& n : names) p.inputs.push_back(work_ / d.domain.name / n);
    }
  };
  switch (stage) {
    case Stage::ingest:
      for (const auto& d : cfg_.domains) {
        for (const auto& c : d.corpus) p.external_inputs.push_back(c);
      }
      break;
    case Stage::roundtrip: each({kCorpus}); break;
    case Stage::build_dataset: each({kCorpus, kRoundtrips}); break;
    case Stage::index:
    case Stage::termbank: each({kPairs, kSplit}); break;
    case Stage::emit_ft: each({kPairs, kSplit, kIndex, kBank}); break;
    case Stage::infer: each({kCorpus, kSplit, kPairs, kIndex, kBank}); break;
    case Stage::evaluate:
      each({kCorpus, kSplit, kRoundtrips});
      for (const auto& n : cfg_.classifier.negatives) p.external_inputs.push_back(n);
      for (const auto& d : cfg_.domains) {
        for (const auto& s : systems()) {
          p.inputs.push_back(work_ / d.domain.name / kResults / (slug(s.name) + ".jsonl"));
        }
      }
      break;
    case Stage::report: each({kEval}); break;
  }
  if (cfg_.embedder.kind == "hashed_tfidf" &&
      (stage == Stage::emit_ft || stage == Stage::infer)) {
    each({kEmbedder});
  }
  return p;
}

std::map<std::string, std::string> Pipeline::hash_inputs(const Plan& plan) const {
  std::map<std::string, std::string> out;
  for (const auto& f : plan.inputs) {
    if (!fs::exists(f)) {
      throw Error("missing_input", "missing input " + rel(f) + "; run the producing stage first");
    }
    out[rel(f)] = sha256_file(f);
  }
  for (const auto& e : plan.external_inputs) {
    const auto path = cfg_.resolve(e);
    if (!fs::exists(path)) throw Error("missing_input", "missing input file " + e);
    out["config:" + e] = sha256_file(path);
  }
  return out;
}

void Pipeline::verify_upstream(const fs::path& input) const {
  const auto key = rel(input);
  for (auto st : all_stages()) {
    auto m = read_manifest(st);
    if (!m) continue;
    auto it = m->outputs.find(key);
    if (it == m->outputs.end()) continue;
    if (sha256_file(input) != it->second) {
      throw Error("checksum_mismatch", "checksum mismatch for " + key + " (recorded by stage " +
                                           m->stage + "); rerun that stage with --force");
    }
    return;
  }
}

StageOutcome Pipeline::run(Stage stage) {
  StageOutcome outcome;
  outcome.stage = stage;
  const auto fingerprint = cfg_.fingerprint();
  const auto p = plan(stage);
  auto previous = read_manifest(stage);

  if (previous && !options_.force) {
    // Recorded outputs must still be intact before anything else happens.
    for (const auto& [path, sha] : previous->outputs) {
      const auto abs = work_ / path;
      if (fs::exists(abs) && sha256_file(abs) != sha) {
        throw Error("checksum_mismatch", "checksum mismatch for " + path + " (output of stage " +
                                             previous->stage + "); rerun with --force");
      }
    }
  }
  for (const auto& f : p.inputs) {
    if (fs::exists(f)) verify_upstream(f);
  }
  const auto inputs = hash_inputs(p);

  if (previous && !options_.force && previous->config_fingerprint == fingerprint &&
      previous->inputs == inputs) {
    const bool outputs_present = std::all_of(
        previous->outputs.begin(), previous->outputs.end(),
        [&](const auto& kv) { return fs::exists(work_ / kv.first); });
    if (outputs_present) {
      outcome.skipped = true;
      outcome.degraded = previous->degraded;
      outcome.message = "unchanged";
      spdlog::info("[{}] skipped (inputs and config unchanged)", to_string(stage));
      return outcome;
    }
  }

  spdlog::info("[{}] running", to_string(stage));
  fs::remove(manifest_path(stage));
  auto produced = execute(stage);
  StageManifest m;
  m.stage = std::string(to_string(stage));
  m.config_fingerprint = fingerprint;
  m.inputs = inputs;
  m.degraded = produced.degraded;
  for (const auto& o : produced.outputs) m.outputs[rel(o)] = sha256_file(o);
  write_file(manifest_path(stage), m.to_json().dump(2) + "\n");
  outcome.degraded = produced.degraded;
  outcome.message = produced.message;
  spdlog::info("[{}] done{}{}", to_string(stage), produced.message.empty() ? "" : ": ",
               produced.message);
  return outcome;
}

std::vector<StageOutcome> Pipeline::run_all() {
  std::vector<StageOutcome> out;
  for (auto st : all_stages()) {
    try {
      out.push_back(run(st));
    } catch (const std::exception& e) {
      StageOutcome o;
      o.stage = st;
      o.failed = true;
      o.message = e.what();
      spdlog::error("[{}] failed: {}", to_string(st), e.what());
      out.push_back(o);
      break;
    }
  }
  return out;
}

int Pipeline::exit_code(const std::vector<StageOutcome>& outcomes) {
  bool degraded = false;
  for (const auto& o : outcomes) {
    if (o.failed) return kExitFailed;
    degraded = degraded || o.degraded;
  }
  return degraded ? kExitDegraded : 0;
}

Pipeline::Produced Pipeline::execute(Stage stage) {
  switch (stage) {
    case Stage::ingest: return do_ingest();
    case Stage::roundtrip: return do_roundtrip();
    case Stage::build_dataset: return do_build_dataset();
    case Stage::index: return do_index();
    case Stage::termbank: return do_termbank();
    case Stage::emit_ft: return do_emit_ft();
    case Stage::infer: return do_infer();
    case Stage::evaluate: return do_evaluate();
    case Stage::report: return do_report();
  }
  throw Error("internal", "unknown stage");
}

Pipeline::Produced Pipeline::do_ingest() {
  Produced out;
  std::vector<std::string> rows;
  for (const auto& d : cfg_.domains) {
    const auto dir = domain_dir(d.domain.name);
    fs::create_directories(dir);
    std::vector<corpus::CorpusRecord> records;
    corpus::IngestStats total;
    for (const auto& c : d.corpus) {
      auto r = corpus::ingest(cfg_.resolve(c), d.domain, c);
      total.documents += r.stats.documents;
      total.sentences += r.stats.sentences;
      total.words += r.stats.words;
      total.invalid_bytes += r.stats.invalid_bytes;
      for (auto& w : r.stats.warnings) total.warnings.push_back(std::move(w));
      for (auto& rec : r.records) records.push_back(std::move(rec));
    }
    auto cleaned = corpus::clean(records, cfg_.clean);
    Json drops = Json::object();
    for (const auto& dr : cleaned.drops) {
      auto key = std::string(corpus::to_string(dr.reason));
      drops[key] = drops.value(key, 0) + 1;
    }
    corpus::write_corpus(dir / kCorpus, cleaned.kept);
    write_file(dir / kIngestStats,
               Json{{"documents", total.documents},
                    {"sentences", total.sentences},
                    {"words", total.words},
                    {"invalid_bytes", total.invalid_bytes},
                    {"kept", cleaned.kept.size()},
                    {"dropped", drops},
                    {"warnings", total.warnings},
                    {"table_row", total.table_row(d.domain.name)}}
                       .dump(2) + "\n");
    out.outputs.push_back(dir / kCorpus);
    out.outputs.push_back(dir / kIngestStats);
    rows.push_back(d.domain.name + ": " + std::to_string(cleaned.kept.size()) + " sentences");
  }
  out.message = text::join(rows, ", ");
  return out;
}

Pipeline::Produced Pipeline::do_roundtrip() {
  Produced out;
  auto& gw = gateway();
  const auto& pivot = cfg_.mt.pivots.front();
  for (const auto& d : cfg_.domains) {
    const auto dir = domain_dir(d.domain.name);
    auto records = corpus::read_corpus(dir / kCorpus);
    std::vector<std::string> texts;
    for (const auto& r : records) texts.push_back(r.text);
    std::vector<mt::RoundtripResult> rts;
    if (!texts.empty()) rts = gw.roundtrip_batch(texts, pivot);
    JsonlWriter w(dir / kRoundtrips);
    std::size_t failed = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      auto j = mt::to_json(rts[i]);
      j["id"] = records[i].id;
      w.write(j);
      failed += !rts[i].ok;
    }
    w.close();
    const double rate = records.empty() ? 0.0 : static_cast<double>(failed) / static_cast<double>(records.size());
    if (rate > cfg_.max_failure_rate) out.degraded = true;
    out.outputs.push_back(dir / kRoundtrips);
  }
  out.message = "pivot " + pivot + ", " + std::to_string(gw.total_calls()) + " MT calls";
  return out;
}

Pipeline::Produced Pipeline::do_build_dataset() {
  Produced out;
  for (const auto& d : cfg_.domains) {
    const auto dir = domain_dir(d.domain.name);
    auto records = corpus::read_corpus(dir / kCorpus);
    auto by_id = read_roundtrips(dir / kRoundtrips);
    std::vector<mt::RoundtripResult> rts;
    for (const auto& r : records) {
      auto it = by_id.find(r.id);
      if (it == by_id.end()) throw Error("consistency", "no roundtrip for record " + r.id);
      rts.push_back(it->second);
    }
    auto built = dataset::assemble_pairs(records, rts, cfg_.pairs, cfg_.max_failure_rate);
    auto sp = dataset::split(built.pairs, records, d.domain);
    dataset::write_pairs(dir / kPairs, built.pairs);
    write_file(dir / kSplit, sp.to_json().dump(1) + "\n");
    write_file(dir / kDatasetReport, built.report.to_json().dump(1) + "\n");
    out.degraded = out.degraded || built.report.degraded;
    out.outputs.insert(out.outputs.end(), {dir / kPairs, dir / kSplit, dir / kDatasetReport});
    spdlog::info("[build-dataset] {}: {} pairs, split train/heldout/test = {}/{}/{}",
                 d.domain.name, built.pairs.size(), sp.train.size(), sp.heldout_classifier.size(),
                 sp.test.size());
  }
  return out;
}

Pipeline::Produced Pipeline::do_index() {
  Produced out;
  for (const auto& d : cfg_.domains) {
    const auto dir = domain_dir(d.domain.name);
    auto split = dataset::DatasetSplit::from_json(Json::parse(read_file(dir / kSplit)));
    auto pairs = train_pairs(dir, split);
    if (pairs.empty()) throw Error("empty_index", "domain " + d.domain.name + " has no training pairs");
    auto embedder = make_embedder(cfg_);
    if (auto* tfidf = dynamic_cast<retrieval::HashedTfidfEmbedder*>(embedder.get())) {
      std::vector<std::string> targets;
      for (const auto& p : pairs) targets.push_back(p.target);
      tfidf->fit(targets);
      tfidf->save(dir / kEmbedder);
      out.outputs.push_back(dir / kEmbedder);
    }
    auto retriever = retrieval::Retriever::build(embedder, pairs);
    retriever.index().save(dir / kIndex);
    out.outputs.push_back(dir / kIndex);
  }
  return out;
}

std::unique_ptr<retrieval::Retriever> Pipeline::load_retriever(const std::string& domain) const {
  const auto dir = domain_dir(domain);
  auto split = dataset::DatasetSplit::from_json(Json::parse(read_file(dir / kSplit)));
  std::shared_ptr<const retrieval::Embedder> embedder;
  if (cfg_.embedder.kind == "hashed_tfidf") {
    embedder = std::make_shared<retrieval::HashedTfidfEmbedder>(
        retrieval::HashedTfidfEmbedder::load(dir / kEmbedder));
  } else {
    embedder = make_embedder(cfg_);
  }
  auto index = retrieval::VectorIndex::load(dir / kIndex, embedder->fingerprint());
  return std::make_unique<retrieval::Retriever>(embedder, std::move(index), train_pairs(dir, split));
}

std::vector<termbank::TermPair> Pipeline::load_bank(const std::string& domain) const {
  return termbank::read_bank(domain_dir(domain) / kBank);
}

Pipeline::Produced Pipeline::do_termbank() {
  Produced out;
  auto& llm = generator();
  for (const auto& d : cfg_.domains) {
    const auto dir = domain_dir(d.domain.name);
    auto split = dataset::DatasetSplit::from_json(Json::parse(read_file(dir / kSplit)));
    termbank::BankOptions opts;
    opts.min_support = static_cast<std::size_t>(cfg_.min_support);
    opts.workers = static_cast<std::size_t>(cfg_.workers);
    auto bank = termbank::build_bank(train_pairs(dir, split), llm, d.domain.name, opts);
    termbank::write_bank(dir / kBank, bank);
    out.outputs.push_back(dir / kBank);
  }
  out.message = std::to_string(llm.calls()) + " generation calls";
  return out;
}

Pipeline::Produced Pipeline::do_emit_ft() {
  Produced out;
  const auto shots = inference::parse_shots(cfg_.finetune_shots);
  for (const auto& d : cfg_.domains) {
    const auto dir = domain_dir(d.domain.name);
    auto split = dataset::DatasetSplit::from_json(Json::parse(read_file(dir / kSplit)));
    auto pairs = train_pairs(dir, split);
    auto retriever = load_retriever(d.domain.name);
    auto bank = load_bank(d.domain.name);
    emitter::EmitOptions opts;
    opts.prompt = cfg_.prompt_spec(d, cfg_.finetune_terms);
    opts.shots = shots;
    opts.domain = d.domain.name;
    opts.seed = static_cast<std::uint64_t>(cfg_.seed);
    opts.shard_size = static_cast<std::size_t>(cfg_.shard_size);
    auto res = emitter::emit_dataset(pairs, opts, retriever.get(), &bank, dir / kData);
    emitter::TrainManifest m;
    m.dataset_path = rel(dir / kData);
    m.dataset_checksum = res.checksum;
    m.records = res.records;
    m.seed = static_cast<std::uint64_t>(cfg_.seed);
    m = emitter::apply_overrides(m, cfg_.manifest_overrides);
    emitter::emit_manifest(m, dir / kTrainManifest);
    out.outputs.insert(out.outputs.end(), res.shards.begin(), res.shards.end());
    out.outputs.push_back(dir / kTrainManifest);
  }
  return out;
}

Pipeline::Produced Pipeline::do_infer() {
  Produced out;
  auto& llm = generator();
  std::size_t failed = 0, degraded = 0, total = 0;
  for (const auto& d : cfg_.domains) {
    const auto dir = domain_dir(d.domain.name);
    auto data = load_domain(dir);
    auto queries = data.texts(data.split.test);
    auto retriever = load_retriever(d.domain.name);
    auto bank = load_bank(d.domain.name);
    fs::create_directories(dir / kResults);
    for (const auto& sys : systems()) {
      inference::TransferConfig tc;
      tc.route = inference::route_from_string(sys.route);
      tc.shots = inference::parse_shots(sys.shots);
      tc.prompt = cfg_.prompt_spec(d, sys.include_terms);
      tc.pivot = cfg_.pivot;
      tc.seed = static_cast<std::uint64_t>(cfg_.seed);
      tc.fail_hard = cfg_.fail_hard;
      tc.workers = static_cast<std::size_t>(cfg_.workers);
      inference::Engine engine(tc, llm, tc.route == inference::Route::rt_first ? &gateway() : nullptr,
                               retriever.get(), &bank);
      inference::BatchSummary summary;
      auto results = engine.batch_transfer(queries, &summary);
      const auto path = dir / kResults / (slug(sys.name) + ".jsonl");
      JsonlWriter w(path);
      for (std::size_t i = 0; i < results.size(); ++i) {
        auto j = results[i].to_json();
        j["id"] = data.split.test[i];
        j["system"] = sys.name;
        j["fingerprint"] = tc.fingerprint();
        w.write(j);
      }
      w.close();
      out.outputs.push_back(path);
      failed += summary.failed;
      degraded += summary.degraded;
      total += summary.total;
    }
  }
  out.degraded = failed > 0 || degraded > 0;
  out.message = std::to_string(total) + " transfers, " + std::to_string(failed) + " failed, " +
                std::to_string(degraded) + " degraded, " + std::to_string(llm.calls()) +
                " generation calls";
  return out;
}

Pipeline::Produced Pipeline::do_evaluate() {
  Produced out;
  std::map<std::string, DomainData> data;
  for (const auto& d : cfg_.domains) data.emplace(d.domain.name, load_domain(domain_dir(d.domain.name)));
  const auto bleu = cfg_.bleu_config();
  std::vector<std::string> general;
  for (const auto& n : cfg_.classifier.negatives) {
    auto ing = corpus::ingest(cfg_.resolve(n), corpus::StyleDomain{"out_of_domain", {}, 0.1}, n);
    for (auto& r : ing.records) general.push_back(std::move(r.text));
  }
  for (const auto& d : cfg_.domains) {
    const auto& name = d.domain.name;
    const auto dir = domain_dir(name);
    const auto& own = data.at(name);

    std::unique_ptr<eval::StyleClassifier> clf;
    Json clf_info;
    if (cfg_.classifier.kind == "http_service") {
      clf = std::make_unique<eval::HttpClassifier>(config::expand_env(cfg_.classifier.endpoint),
                                                   cfg_.client_options());
      clf_info = Json{{"fingerprint", clf->fingerprint()}};
    } else {
      auto positives = own.texts(own.split.heldout_classifier);
      std::vector<std::string> negatives;
      for (const auto& [other, od] : data) {
        if (other == name) continue;
        for (auto& t : od.texts(od.split.heldout_classifier)) negatives.push_back(std::move(t));
      }
      negatives.insert(negatives.end(), general.begin(), general.end());
      if (negatives.empty()) {
        throw Error("config", "the built-in classifier needs a second domain for negatives");
      }
      eval::TrainOptions to;
      to.max_epochs = static_cast<int>(cfg_.classifier.max_epochs);
      to.learning_rate = cfg_.classifier.learning_rate;
      to.l2 = cfg_.classifier.l2;
      to.seed = static_cast<std::uint64_t>(cfg_.seed);
      eval::TrainReport tr;
      auto lin = eval::LinearClassifier::train(positives, negatives, to, &tr);
      lin.save(dir / kClassifier);
      out.outputs.push_back(dir / kClassifier);
      clf_info = Json{{"fingerprint", lin.fingerprint()},
                      {"positives", positives.size()},
                      {"negatives", negatives.size()},
                      {"epochs", tr.epochs},
                      {"train_accuracy", tr.train_accuracy},
                      {"validation_accuracy", tr.validation_accuracy}};
      clf = std::make_unique<eval::LinearClassifier>(std::move(lin));
    }

    std::vector<eval::ReportRow> rows;
    auto rts = read_roundtrips(dir / kRoundtrips);
    eval::SystemRun baseline;
    baseline.method = std::string(eval::kBaselineMethod);
    baseline.domain = name;
    baseline.fingerprint = "pivot=" + cfg_.mt.pivots.front();
    for (const auto& id : own.split.test) {
      auto it = rts.find(id);
      if (it == rts.end() || !it->second.ok) continue;
      baseline.hypotheses.push_back(it->second.neutral);
      baseline.sources.push_back(own.record(id).text);
    }
    rows.push_back(eval::evaluate_run(baseline, *clf, bleu));
    for (const auto& sys : systems()) {
      eval::SystemRun run;
      run.method = sys.name;
      run.domain = name;
      for (const auto& j : read_jsonl(dir / kResults / (slug(sys.name) + ".jsonl"))) {
        run.fingerprint = j.at("fingerprint").get<std::string>();
        run.hypotheses.push_back(j.at("ok").get<bool>() ? j.at("output").get<std::string>() : "");
        run.sources.push_back(j.at("input").get<std::string>());
      }
      rows.push_back(eval::evaluate_run(run, *clf, bleu));
    }
    Json jr = Json::array();
    for (const auto& r : rows) {
      jr.push_back(Json{{"method", r.method}, {"domain", r.domain}, {"bleu", r.bleu},
                        {"acc", r.acc},       {"n", r.n},           {"fingerprint", r.fingerprint}});
    }
    write_file(dir / kEval, Json{{"domain", name}, {"classifier", clf_info}, {"rows", jr}}.dump(2) + "\n");
    out.outputs.push_back(dir / kEval);
  }
  return out;
}

Pipeline::Produced Pipeline::do_report() {
  Produced out;
  std::vector<eval::ReportRow> rows;
  for (const auto& d : cfg_.domains) {
    auto j = Json::parse(read_file(domain_dir(d.domain.name) / kEval));
    for (const auto& r : j.at("rows")) {
      eval::ReportRow row{r.at("method").get<std::string>(), r.at("domain").get<std::string>(),
                          r.at("bleu").get<double>(),    r.at("acc").get<double>(),
                          r.at("n").get<std::size_t>(),  r.at("fingerprint").get<std::string>()};
      row.fingerprint += "/embedder=" + cfg_.embedder.kind;
      rows.push_back(std::move(row));
    }
  }
  auto report = eval::build_report(std::move(rows), cfg_.bleu_config(), eval::BleuMode::source);
  auto j = report.to_json();
  j["config_fingerprint"] = cfg_.fingerprint();
  write_file(work_ / "report.json", j.dump(2) + "\n");
  write_file(work_ / "report.csv", report.to_csv());
  write_file(work_ / "report.md", report.to_markdown());
  out.outputs = {work_ / "report.json", work_ / "report.csv", work_ / "report.md"};
  return out;
}

}  // namespace stylepipe::pipeline
