// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "stylepipe/config.hpp"
#include "stylepipe/emitter.hpp"
#include "stylepipe/error.hpp"
#include "stylepipe/log.hpp"
#include "stylepipe/pipeline.hpp"
#include "stylepipe/termbank.hpp"
#include "stylepipe/text.hpp"

namespace fs = std::filesystem;
using namespace stylepipe;

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::int64_t> seed;
  std::optional<std::int64_t> workers;
  std::string log_level = "info";
  bool force = false;
};

config::RunConfig load_config(const Globals& g) {
  if (g.config_path.empty()) throw Error("config", "--config is required for this command");
  auto cfg = config::RunConfig::load(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  if (g.workers) cfg.workers = *g.workers;
  cfg.validate();
  return cfg;
}

// One text per nonblank line; .jsonl inputs use the "text" field.
std::vector<std::string> read_texts(const fs::path& path) {
  std::vector<std::string> out;
  if (path.extension() == ".jsonl") {
    for (const auto& j : read_jsonl(path)) out.push_back(j.at("text").get<std::string>());
    return out;
  }
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot read " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::collapse_whitespace(line);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

int run_stages(const Globals& g, const std::vector<pipeline::Stage>& stages) {
  pipeline::Pipeline p(load_config(g), {g.force});
  std::vector<pipeline::StageOutcome> outcomes;
  for (auto st : stages) {
    try {
      outcomes.push_back(p.run(st));
    } catch (const std::exception& e) {
      spdlog::error("[{}] failed: {}", pipeline::to_string(st), e.what());
      outcomes.push_back({st, false, true, false, e.what()});
      break;
    }
  }
  for (const auto& o : outcomes) {
    std::printf("%-14s %s%s\n", std::string(pipeline::to_string(o.stage)).c_str(),
                o.failed ? "FAILED" : o.skipped ? "skipped" : "ok",
                o.degraded ? " (degraded)" : "");
  }
  return pipeline::Pipeline::exit_code(outcomes);
}

int cmd_roundtrip(const Globals& g, const std::string& pivot, const fs::path& in, const fs::path& out) {
  pipeline::Pipeline p(load_config(g), {g.force});
  auto texts = read_texts(in);
  if (texts.empty()) throw Error("precondition", "no input texts in " + in.string());
  auto rts = p.gateway().roundtrip_batch(texts, pivot.empty() ? p.config().mt.pivots.front() : pivot);
  JsonlWriter w(out);
  std::size_t failed = 0;
  for (const auto& r : rts) {
    w.write(mt::to_json(r));
    failed += !r.ok;
  }
  w.close();
  spdlog::info("roundtrip: {} texts, {} failed, {} MT calls", rts.size(), failed, p.gateway().total_calls());
  const double rate = static_cast<double>(failed) / static_cast<double>(rts.size());
  return rate > p.config().max_failure_rate ? pipeline::kExitDegraded : 0;
}

int cmd_termbank(const Globals& g, const fs::path& pairs_path, const fs::path& out,
                 std::string domain) {
  pipeline::Pipeline p(load_config(g), {g.force});
  auto pairs = dataset::read_pairs(pairs_path);
  if (domain.empty() && !pairs.empty()) domain = pairs.front().domain;
  termbank::BankOptions opts;
  opts.min_support = static_cast<std::size_t>(p.config().min_support);
  opts.workers = static_cast<std::size_t>(p.config().workers);
  auto bank = termbank::build_bank(pairs, p.generator(), domain, opts);
  termbank::write_bank(out, bank);
  return 0;
}

int cmd_emit(const Globals& g, const fs::path& spec_path, const fs::path& out_dir) {
  const Json spec = config::toml_to_json(read_file(spec_path));
  static const std::set<std::string> kKeys = {
      "pairs", "domain", "style_name", "template", "include_terms", "shot_order", "shots",
      "seed", "shard_size", "index", "embedder", "bank", "overrides"};
  for (const auto& [k, v] : spec.items()) {
    if (!kKeys.count(k)) throw Error("config", "emit spec: unknown key '" + k + "'");
  }
  const auto base = spec_path.parent_path().empty() ? fs::path(".") : spec_path.parent_path();
  auto path_of = [&](const char* key) -> std::optional<fs::path> {
    if (!spec.contains(key)) return std::nullopt;
    fs::path p(config::expand_env(spec.at(key).get<std::string>()));
    return p.is_absolute() ? p : base / p;
  };
  auto pairs_path = path_of("pairs");
  if (!pairs_path) throw Error("config", "emit spec needs 'pairs'");
  auto pairs = dataset::read_pairs(*pairs_path);

  emitter::EmitOptions opts;
  opts.domain = spec.value("domain", pairs.empty() ? std::string() : pairs.front().domain);
  opts.prompt.style_name = spec.value("style_name", opts.domain);
  opts.prompt.tmpl = prompting::template_from_string(spec.value("template", std::string("I")));
  opts.prompt.include_terms = spec.value("include_terms", false);
  opts.prompt.shot_order =
      prompting::shot_order_from_string(spec.value("shot_order", std::string("most-similar-last")));
  opts.shots = inference::parse_shots(spec.value("shots", std::string("none")));
  opts.seed = static_cast<std::uint64_t>(g.seed.value_or(spec.value("seed", std::int64_t{0})));
  opts.shard_size = spec.value("shard_size", emitter::kShardSize);

  std::unique_ptr<retrieval::Retriever> retriever;
  if (opts.shots.mode != inference::ShotMode::none) {
    auto index_path = path_of("index");
    auto embedder_path = path_of("embedder");
    if (index_path && embedder_path) {
      auto emb = std::make_shared<retrieval::HashedTfidfEmbedder>(
          retrieval::HashedTfidfEmbedder::load(*embedder_path));
      retriever = std::make_unique<retrieval::Retriever>(
          emb, retrieval::VectorIndex::load(*index_path, emb->fingerprint()), pairs);
    } else {
      auto emb = std::make_shared<retrieval::HashedTfidfEmbedder>();
      std::vector<std::string> targets;
      for (const auto& p : pairs) targets.push_back(p.target);
      emb->fit(targets);
      retriever = std::make_unique<retrieval::Retriever>(retrieval::Retriever::build(emb, pairs));
    }
  }
  std::vector<termbank::TermPair> bank;
  if (opts.prompt.include_terms) {
    auto bank_path = path_of("bank");
    if (!bank_path) throw Error("config", "include_terms needs 'bank'");
    bank = termbank::read_bank(*bank_path);
  }
  auto res = emitter::emit_dataset(pairs, opts, retriever.get(), &bank, out_dir);
  emitter::TrainManifest m;
  m.dataset_path = out_dir.generic_string();
  m.dataset_checksum = res.checksum;
  m.records = res.records;
  m.seed = opts.seed;
  m = emitter::apply_overrides(m, spec.value("overrides", Json::object()));
  emitter::emit_manifest(m, out_dir / "train_manifest.json");
  std::printf("%zu records, sha256 %s\n", res.records, res.checksum.c_str());
  return 0;
}

int cmd_infer(const Globals& g, const std::string& route, const std::string& shots, bool terms,
              std::string domain, const fs::path& in, const fs::path& out) {
  pipeline::Pipeline p(load_config(g), {g.force});
  const auto& cfg = p.config();
  if (domain.empty()) domain = cfg.domains.front().domain.name;
  const auto& d = cfg.domain(domain);
  inference::TransferConfig tc;
  tc.route = inference::route_from_string(route);
  tc.shots = inference::parse_shots(shots);
  tc.prompt = cfg.prompt_spec(d, terms);
  tc.pivot = cfg.pivot;
  tc.seed = static_cast<std::uint64_t>(cfg.seed);
  tc.fail_hard = cfg.fail_hard;
  tc.workers = static_cast<std::size_t>(cfg.workers);
  std::unique_ptr<retrieval::Retriever> retriever;
  if (tc.shots.mode != inference::ShotMode::none) retriever = p.load_retriever(domain);
  std::vector<termbank::TermPair> bank;
  if (terms) bank = p.load_bank(domain);
  inference::Engine engine(tc, p.generator(),
                           tc.route == inference::Route::rt_first ? &p.gateway() : nullptr,
                           retriever.get(), &bank);
  auto queries = read_texts(in);
  inference::BatchSummary summary;
  auto results = engine.batch_transfer(queries, &summary);
  JsonlWriter w(out);
  for (const auto& r : results) {
    auto j = r.to_json();
    j["fingerprint"] = tc.fingerprint();
    w.write(j);
  }
  w.close();
  if (summary.failed > 0) return pipeline::kExitFailed;
  return summary.degraded > 0 ? pipeline::kExitDegraded : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stylepipe: retrieval-augmented style transfer data and inference pipeline"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Run configuration (TOML)");
  app.add_option("--seed", g.seed, "Override the configured seed");
  app.add_option("--workers", g.workers, "Override the configured worker count")->check(CLI::PositiveNumber);
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error, off");
  app.add_flag("--force", g.force, "Rerun stages even when their inputs are unchanged");

  auto* all = app.add_subcommand("all", "Run every stage in order");
  auto* ingest = app.add_subcommand("ingest", "Segment and clean the domain corpora");

  auto* rt = app.add_subcommand("roundtrip", "Roundtrip-translate corpora or a text file");
  std::string rt_pivot;
  fs::path rt_in, rt_out;
  rt->add_option("--pivot", rt_pivot, "Pivot language");
  auto* rt_in_opt = rt->add_option("--in", rt_in, "Texts, one per line");
  rt->add_option("--out", rt_out, "Output JSONL")->needs(rt_in_opt);

  auto* build = app.add_subcommand("build-dataset", "Assemble and split pseudo-parallel pairs");
  auto* index = app.add_subcommand("index", "Embed training targets and build the vector index");

  auto* tb = app.add_subcommand("termbank", "Extract the terminology bank");
  fs::path tb_pairs, tb_out;
  std::string tb_domain;
  auto* tb_pairs_opt = tb->add_option("--pairs", tb_pairs, "Pseudo-parallel pairs JSONL");
  tb->add_option("--out", tb_out, "Bank JSONL")->needs(tb_pairs_opt);
  tb->add_option("--domain", tb_domain, "Domain name recorded in the bank");

  auto* emit = app.add_subcommand("emit-ft", "Emit the finetuning dataset and manifest");
  fs::path emit_spec, emit_out;
  auto* emit_spec_opt = emit->add_option("--spec", emit_spec, "Emission spec (TOML)");
  emit->add_option("--out", emit_out, "Output directory")->needs(emit_spec_opt);

  auto* infer = app.add_subcommand("infer", "Run style transfer");
  std::string inf_route = "rt-first", inf_shots = "similar:5", inf_domain;
  bool inf_no_terms = false;
  fs::path inf_in, inf_out;
  infer->add_option("--route", inf_route, "rt-first or direct");
  infer->add_option("--shots", inf_shots, "none, random:K or similar:K");
  infer->add_option("--domain", inf_domain, "Target style domain");
  infer->add_flag("--no-terms", inf_no_terms, "Disable term guidance");
  auto* inf_in_opt = infer->add_option("--in", inf_in, "Queries, one per line");
  infer->add_option("--out", inf_out, "Results JSONL")->needs(inf_in_opt);

  auto* evaluate = app.add_subcommand("evaluate", "Train classifiers and score every system");
  auto* report = app.add_subcommand("report", "Render report.json, report.csv and report.md");

  CLI11_PARSE(app, argc, argv);

  try {
    set_log_level(g.log_level);
    using pipeline::Stage;
    if (all->parsed()) return run_stages(g, pipeline::all_stages());
    if (ingest->parsed()) return run_stages(g, {Stage::ingest});
    if (build->parsed()) return run_stages(g, {Stage::build_dataset});
    if (index->parsed()) return run_stages(g, {Stage::index});
    if (evaluate->parsed()) return run_stages(g, {Stage::evaluate});
    if (report->parsed()) return run_stages(g, {Stage::report});
    if (rt->parsed()) {
      if (rt_in.empty()) return run_stages(g, {Stage::roundtrip});
      if (rt_out.empty()) throw Error("config", "roundtrip --in needs --out");
      return cmd_roundtrip(g, rt_pivot, rt_in, rt_out);
    }
    if (tb->parsed()) {
      if (tb_pairs.empty()) return run_stages(g, {Stage::termbank});
      if (tb_out.empty()) throw Error("config", "termbank --pairs needs --out");
      return cmd_termbank(g, tb_pairs, tb_out, tb_domain);
    }
    if (emit->parsed()) {
      if (emit_spec.empty()) return run_stages(g, {Stage::emit_ft});
      if (emit_out.empty()) throw Error("config", "emit-ft --spec needs --out");
      return cmd_emit(g, emit_spec, emit_out);
    }
    if (infer->parsed()) {
      if (inf_in.empty()) return run_stages(g, {Stage::infer});
      if (inf_out.empty()) throw Error("config", "infer --in needs --out");
      return cmd_infer(g, inf_route, inf_shots, !inf_no_terms, inf_domain, inf_in, inf_out);
    }
  } catch (const Error& e) {
    spdlog::error("{}: {}", e.code(), e.what());
    return pipeline::kExitFailed;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return pipeline::kExitFailed;
  }
  return 0;
}
