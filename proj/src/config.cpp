// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "stylepipe/config.hpp"

#include <cstdlib>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "stylepipe/error.hpp"
#include "stylepipe/hash.hpp"
#include "stylepipe/log.hpp"

namespace stylepipe::config {
namespace {

Json node_to_json(const toml::node& node) {
  if (auto t = node.as_table()) {
    Json j = Json::object();
    for (const auto& [k, v] : *t) j[std::string(k.str())] = node_to_json(v);
    return j;
  }
  if (auto a = node.as_array()) {
    Json j = Json::array();
    for (const auto& v : *a) j.push_back(node_to_json(v));
    return j;
  }
  if (auto s = node.as_string()) return Json(s->get());
  if (auto i = node.as_integer()) return Json(i->get());
  if (auto f = node.as_floating_point()) return Json(f->get());
  if (auto b = node.as_boolean()) return Json(b->get());
  throw Error("config", "unsupported TOML value (dates and times are not used)");
}

void json_to_toml_into(const Json& j, toml::table& out);

toml::array json_array_to_toml(const Json& j) {
  toml::array a;
  for (const auto& v : j) {
    if (v.is_object()) {
      toml::table t;
      json_to_toml_into(v, t);
      a.push_back(std::move(t));
    } else if (v.is_array()) {
      a.push_back(json_array_to_toml(v));
    } else if (v.is_string()) {
      a.push_back(v.get<std::string>());
    } else if (v.is_boolean()) {
      a.push_back(v.get<bool>());
    } else if (v.is_number_integer()) {
      a.push_back(v.get<std::int64_t>());
    } else if (v.is_number_float()) {
      a.push_back(v.get<double>());
    } else {
      throw Error("config", "cannot express null in TOML");
    }
  }
  return a;
}

void json_to_toml_into(const Json& j, toml::table& out) {
  for (const auto& [k, v] : j.items()) {
    if (v.is_object()) {
      toml::table t;
      json_to_toml_into(v, t);
      out.insert(k, std::move(t));
    } else if (v.is_array()) {
      out.insert(k, json_array_to_toml(v));
    } else if (v.is_string()) {
      out.insert(k, v.get<std::string>());
    } else if (v.is_boolean()) {
      out.insert(k, v.get<bool>());
    } else if (v.is_number_integer()) {
      out.insert(k, v.get<std::int64_t>());
    } else if (v.is_number_float()) {
      out.insert(k, v.get<double>());
    } else {
      throw Error("config", "cannot express null in TOML");
    }
  }
}

// Typed access with unknown-key rejection.
class Reader {
 public:
  Reader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw Error("config", where_ + ": expected a table");
  }
  ~Reader() = default;

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw Error("config", where_ + "." + key + ": wrong type");
    }
  }

  const Json* sub(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw Error("config", where_ + ": unknown key '" + k + "'");
    }
  }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

template <>
void Reader::get<double>(const char* key, double& out) {
  seen_.insert(key);
  if (!j_.contains(key)) return;
  const auto& v = j_.at(key);
  if (!v.is_number()) throw Error("config", where_ + "." + key + ": expected a number");
  out = v.get<double>();
}

}  // namespace

std::string expand_env(std::string_view s) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, 2, "${") == 0) {
      const auto close = s.find('}', i + 2);
      if (close == std::string_view::npos) throw Error("config", "unterminated ${ in '" + std::string(s) + "'");
      std::string body(s.substr(i + 2, close - i - 2));
      std::string fallback;
      if (auto d = body.find(":-"); d != std::string::npos) {
        fallback = body.substr(d + 2);
        body.resize(d);
      }
      const char* v = std::getenv(body.c_str());
      out += (v && *v) ? std::string(v) : fallback;
      i = close + 1;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

Json RunConfig::to_json() const {
  Json doms = Json::array();
  for (const auto& d : domains) {
    doms.push_back(Json{{"name", d.domain.name},
                        {"description", d.domain.description},
                        {"heldout_fraction", d.domain.heldout_fraction},
                        {"style_name", d.style_name},
                        {"corpus", d.corpus}});
  }
  Json backends = Json::array();
  for (const auto& b : mt.backends) {
    backends.push_back(Json{{"id", b.id},           {"kind", b.kind},       {"endpoint", b.endpoint},
                            {"src", b.src},         {"tgt", b.tgt},         {"model_tag", b.model_tag},
                            {"seed", b.seed},       {"permute", b.permute}, {"inverse", b.inverse},
                            {"synonyms", b.synonyms}});
  }
  Json routes = Json::array();
  for (const auto& r : mt.routes) {
    routes.push_back(Json{{"pivot", r.pivot}, {"forward", r.forward}, {"backward", r.backward}});
  }
  Json sys = Json::array();
  for (const auto& s : systems) {
    sys.push_back(Json{{"name", s.name},
                       {"route", s.route},
                       {"shots", s.shots},
                       {"include_terms", s.include_terms}});
  }
  return Json{
      {"seed", seed},
      {"workers", workers},
      {"work_dir", work_dir},
      {"domains", doms},
      {"clean",
       {{"min_tokens", clean.min_tokens},
        {"max_tokens", clean.max_tokens},
        {"min_alpha_ratio", clean.min_alpha_ratio},
        {"dedup", clean.dedup}}},
      {"pairs",
       {{"min_ratio", pairs.min_ratio},
        {"max_ratio", pairs.max_ratio},
        {"min_neutral_tokens", pairs.min_neutral_tokens},
        {"max_failure_rate", max_failure_rate}}},
      {"mt",
       {{"pivots", mt.pivots},
        {"batch_size", mt.batch_size},
        {"max_in_flight", mt.max_in_flight},
        {"retry_attempts", mt.retry_attempts},
        {"retry_base_ms", mt.retry_base_ms},
        {"timeout_ms", mt.timeout_ms},
        {"cache", mt.cache},
        {"backends", backends},
        {"routes", routes}}},
      {"generation",
       {{"id", generation.id},
        {"kind", generation.kind},
        {"endpoint", generation.endpoint},
        {"model_tag", generation.model_tag},
        {"max_new_tokens", generation.max_new_tokens},
        {"temperature", generation.temperature},
        {"rulebook", generation.rulebook}}},
      {"embedder",
       {{"kind", embedder.kind},
        {"min_n", embedder.min_n},
        {"max_n", embedder.max_n},
        {"dim", embedder.dim},
        {"drop_stopwords", embedder.drop_stopwords},
        {"endpoint", embedder.endpoint},
        {"model_tag", embedder.model_tag}}},
      {"classifier",
       {{"kind", classifier.kind},
        {"endpoint", classifier.endpoint},
        {"max_epochs", classifier.max_epochs},
        {"learning_rate", classifier.learning_rate},
        {"l2", classifier.l2},
        {"negatives", classifier.negatives}}},
      {"prompt", {{"template", prompt_template}, {"shot_order", shot_order}}},
      {"finetune",
       {{"shots", finetune_shots},
        {"include_terms", finetune_terms},
        {"shard_size", shard_size},
        {"overrides", manifest_overrides}}},
      {"termbank", {{"min_support", min_support}}},
      {"inference", {{"pivot", pivot}, {"fail_hard", fail_hard}}},
      {"systems", sys},
      {"eval",
       {{"max_order", bleu_max_order},
        {"case_sensitive", bleu_case_sensitive}}}};
}

RunConfig RunConfig::from_json(const Json& j) {
  RunConfig c;
  Reader top(j, "config");
  top.get("seed", c.seed);
  top.get("workers", c.workers);
  top.get("work_dir", c.work_dir);
  if (auto doms = top.sub("domains")) {
    if (!doms->is_array()) throw Error("config", "domains must be an array of tables");
    for (const auto& dj : *doms) {
      DomainConfig d;
      Reader r(dj, "domains");
      r.get("name", d.domain.name);
      r.get("description", d.domain.description);
      r.get("heldout_fraction", d.domain.heldout_fraction);
      r.get("style_name", d.style_name);
      if (auto cj = r.sub("corpus")) {
        if (cj->is_string()) {
          d.corpus.push_back(cj->get<std::string>());
        } else if (cj->is_array()) {
          for (const auto& p : *cj) d.corpus.push_back(p.get<std::string>());
        } else {
          throw Error("config", "domains.corpus must be a path or a list of paths");
        }
      }
      r.finish();
      if (d.style_name.empty()) d.style_name = d.domain.name;
      c.domains.push_back(std::move(d));
    }
  }
  if (auto s = top.sub("clean")) {
    Reader r(*s, "clean");
    r.get("min_tokens", c.clean.min_tokens);
    r.get("max_tokens", c.clean.max_tokens);
    r.get("min_alpha_ratio", c.clean.min_alpha_ratio);
    r.get("dedup", c.clean.dedup);
    r.finish();
  }
  if (auto s = top.sub("pairs")) {
    Reader r(*s, "pairs");
    r.get("min_ratio", c.pairs.min_ratio);
    r.get("max_ratio", c.pairs.max_ratio);
    r.get("min_neutral_tokens", c.pairs.min_neutral_tokens);
    r.get("max_failure_rate", c.max_failure_rate);
    r.finish();
  }
  if (auto s = top.sub("mt")) {
    Reader r(*s, "mt");
    r.get("pivots", c.mt.pivots);
    r.get("batch_size", c.mt.batch_size);
    r.get("max_in_flight", c.mt.max_in_flight);
    r.get("retry_attempts", c.mt.retry_attempts);
    r.get("retry_base_ms", c.mt.retry_base_ms);
    r.get("timeout_ms", c.mt.timeout_ms);
    r.get("cache", c.mt.cache);
    if (auto bs = r.sub("backends")) {
      for (const auto& bj : *bs) {
        MtBackendConfig b;
        Reader br(bj, "mt.backends");
        br.get("id", b.id);
        br.get("kind", b.kind);
        br.get("endpoint", b.endpoint);
        br.get("src", b.src);
        br.get("tgt", b.tgt);
        br.get("model_tag", b.model_tag);
        br.get("seed", b.seed);
        br.get("permute", b.permute);
        br.get("inverse", b.inverse);
        br.get("synonyms", b.synonyms);
        br.finish();
        c.mt.backends.push_back(std::move(b));
      }
    }
    if (auto rs = r.sub("routes")) {
      for (const auto& rj : *rs) {
        RouteConfig rc;
        Reader rr(rj, "mt.routes");
        rr.get("pivot", rc.pivot);
        rr.get("forward", rc.forward);
        rr.get("backward", rc.backward);
        rr.finish();
        c.mt.routes.push_back(std::move(rc));
      }
    }
    r.finish();
  }
  if (auto s = top.sub("generation")) {
    Reader r(*s, "generation");
    r.get("id", c.generation.id);
    r.get("kind", c.generation.kind);
    r.get("endpoint", c.generation.endpoint);
    r.get("model_tag", c.generation.model_tag);
    r.get("max_new_tokens", c.generation.max_new_tokens);
    r.get("temperature", c.generation.temperature);
    r.get("rulebook", c.generation.rulebook);
    r.finish();
  }
  if (auto s = top.sub("embedder")) {
    Reader r(*s, "embedder");
    r.get("kind", c.embedder.kind);
    r.get("min_n", c.embedder.min_n);
    r.get("max_n", c.embedder.max_n);
    r.get("dim", c.embedder.dim);
    r.get("drop_stopwords", c.embedder.drop_stopwords);
    r.get("endpoint", c.embedder.endpoint);
    r.get("model_tag", c.embedder.model_tag);
    r.finish();
  }
  if (auto s = top.sub("classifier")) {
    Reader r(*s, "classifier");
    r.get("kind", c.classifier.kind);
    r.get("endpoint", c.classifier.endpoint);
    r.get("max_epochs", c.classifier.max_epochs);
    r.get("learning_rate", c.classifier.learning_rate);
    r.get("l2", c.classifier.l2);
    r.get("negatives", c.classifier.negatives);
    r.finish();
  }
  if (auto s = top.sub("prompt")) {
    Reader r(*s, "prompt");
    r.get("template", c.prompt_template);
    r.get("shot_order", c.shot_order);
    r.finish();
  }
  if (auto s = top.sub("finetune")) {
    Reader r(*s, "finetune");
    r.get("shots", c.finetune_shots);
    r.get("include_terms", c.finetune_terms);
    r.get("shard_size", c.shard_size);
    if (auto o = r.sub("overrides")) c.manifest_overrides = *o;
    r.finish();
  }
  if (auto s = top.sub("termbank")) {
    Reader r(*s, "termbank");
    r.get("min_support", c.min_support);
    r.finish();
  }
  if (auto s = top.sub("inference")) {
    Reader r(*s, "inference");
    r.get("pivot", c.pivot);
    r.get("fail_hard", c.fail_hard);
    r.finish();
  }
  if (auto s = top.sub("systems")) {
    for (const auto& sj : *s) {
      SystemConfig sc;
      Reader r(sj, "systems");
      r.get("name", sc.name);
      r.get("route", sc.route);
      r.get("shots", sc.shots);
      r.get("include_terms", sc.include_terms);
      r.finish();
      c.systems.push_back(std::move(sc));
    }
  }
  if (auto s = top.sub("eval")) {
    Reader r(*s, "eval");
    r.get("max_order", c.bleu_max_order);
    r.get("case_sensitive", c.bleu_case_sensitive);
    r.finish();
  }
  top.finish();
  c.validate();
  return c;
}

void RunConfig::validate() const {
  if (workers < 1) throw Error("config", "workers must be at least 1");
  if (seed < 0) throw Error("config", "seed must be non-negative");
  if (domains.empty()) throw Error("config", "at least one domain is required");
  std::set<std::string> names;
  for (const auto& d : domains) {
    d.domain.validate();
    if (!names.insert(d.domain.name).second) throw Error("config", "duplicate domain " + d.domain.name);
    if (d.domain.name.find_first_of("/\\ ") != std::string::npos || d.domain.name == "." ||
        d.domain.name == ".." || d.domain.name == "manifests") {
      throw Error("config", "domain name must be a plain directory name: " + d.domain.name);
    }
    if (d.corpus.empty()) throw Error("config", "domain " + d.domain.name + " has no corpus");
  }
  if (mt.backends.empty() || mt.routes.empty()) throw Error("config", "mt needs backends and routes");
  std::set<std::string> ids;
  for (const auto& b : mt.backends) {
    mt::backend_kind_from_string(b.kind);
    if (!ids.insert(b.id).second) throw Error("config", "duplicate MT backend " + b.id);
  }
  std::set<std::string> route_pivots;
  for (const auto& r : mt.routes) {
    if (!ids.count(r.forward) || !ids.count(r.backward)) {
      throw Error("config", "route " + r.pivot + " names an unknown backend");
    }
    route_pivots.insert(r.pivot);
  }
  if (mt.pivots.empty()) throw Error("config", "mt.pivots must list at least one pivot");
  for (const auto& p : mt.pivots) {
    if (!route_pivots.count(p)) throw Error("config", "no MT route for pivot " + p);
  }
  if (!route_pivots.count(pivot)) throw Error("config", "no MT route for inference pivot " + pivot);
  if (mt.batch_size < 1 || mt.max_in_flight < 1 || mt.retry_attempts < 1 || mt.retry_base_ms < 0 ||
      mt.timeout_ms < 1) {
    throw Error("config", "mt limits must be positive");
  }
  generation::gen_kind_from_string(generation.kind);
  if (generation.kind == "mock_rulebook" && generation.rulebook.empty()) {
    throw Error("config", "mock_rulebook needs generation.rulebook");
  }
  if (!(generation.temperature >= 0)) throw Error("config", "temperature must be >= 0");
  if (embedder.kind != "hashed_tfidf" && embedder.kind != "http") {
    throw Error("config", "embedder.kind must be hashed_tfidf or http");
  }
  if (classifier.kind != "builtin_linear" && classifier.kind != "http_service") {
    throw Error("config", "classifier.kind must be builtin_linear or http_service");
  }
  prompting::template_from_string(prompt_template);
  prompting::shot_order_from_string(shot_order);
  inference::parse_shots(finetune_shots);
  if (shard_size < 1) throw Error("config", "finetune.shard_size must be positive");
  if (min_support < 1) throw Error("config", "termbank.min_support must be positive");
  std::set<std::string> system_names;
  for (const auto& s : systems) {
    if (s.name.empty() || s.name == eval::kBaselineMethod) {
      throw Error("config", "system names must be nonempty and differ from the baseline");
    }
    if (!system_names.insert(s.name).second) throw Error("config", "duplicate system " + s.name);
    inference::route_from_string(s.route);
    inference::parse_shots(s.shots);
  }
  bleu_config().validate();
  if (!(max_failure_rate >= 0 && max_failure_rate <= 1)) {
    throw Error("config", "max_failure_rate must be in [0, 1]");
  }
}

std::string RunConfig::to_toml() const {
  toml::table t;
  json_to_toml_into(to_json(), t);
  std::ostringstream out;
  out << t << "\n";
  return out.str();
}

Json toml_to_json(std::string_view text) {
  try {
    return node_to_json(toml::parse(text));
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " at line " << e.source().begin.line;
    throw Error("config", msg.str());
  }
}

RunConfig RunConfig::parse_toml(std::string_view text, const std::filesystem::path& base_dir) {
  auto c = from_json(toml_to_json(text));
  c.base_dir = base_dir;
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_toml(read_file(path), base);
}

std::string RunConfig::fingerprint() const {
  auto j = to_json();
  j.erase("work_dir");
  j.erase("workers");
  return sha256_hex(j.dump());
}

std::filesystem::path RunConfig::resolve(const std::string& path) const {
  std::filesystem::path p(expand_env(path));
  return p.is_absolute() ? p : base_dir / p;
}

std::vector<mt::MtBackendSpec> RunConfig::mt_specs() const {
  std::vector<mt::MtBackendSpec> out;
  for (const auto& b : mt.backends) {
    mt::MtBackendSpec s;
    s.backend_id = b.id;
    s.kind = mt::backend_kind_from_string(b.kind);
    s.endpoint = expand_env(b.endpoint);
    s.src_lang = b.src;
    s.tgt_lang = b.tgt;
    s.model_tag = b.model_tag;
    s.seed = static_cast<std::uint64_t>(b.seed);
    s.permute = b.permute;
    s.inverse = b.inverse;
    if (!b.synonyms.empty()) s.synonyms = read_synonyms_tsv(resolve(b.synonyms));
    out.push_back(std::move(s));
  }
  return out;
}

mt::GatewayOptions RunConfig::gateway_options() const {
  mt::GatewayOptions o;
  o.batch_size = static_cast<std::size_t>(mt.batch_size);
  o.max_in_flight = static_cast<std::size_t>(mt.max_in_flight);
  o.retry.attempts = static_cast<int>(mt.retry_attempts);
  o.retry.base_delay = std::chrono::milliseconds(mt.retry_base_ms);
  return o;
}

http::ClientOptions RunConfig::client_options() const {
  http::ClientOptions o;
  o.timeout = std::chrono::milliseconds(mt.timeout_ms);
  o.api_key = expand_env("${STYLEPIPE_API_KEY}");
  return o;
}

generation::GenBackendSpec RunConfig::generation_spec() const {
  generation::GenBackendSpec s;
  s.backend_id = generation.id;
  s.kind = generation::gen_kind_from_string(generation.kind);
  s.endpoint = expand_env(generation.endpoint);
  s.model_tag = generation.model_tag;
  s.max_new_tokens = static_cast<int>(generation.max_new_tokens);
  s.temperature = generation.temperature;
  if (!generation.rulebook.empty()) s.rulebook = generation::read_rulebook_tsv(resolve(generation.rulebook).string());
  return s;
}

prompting::PromptSpec RunConfig::prompt_spec(const DomainConfig& d, bool include_terms) const {
  prompting::PromptSpec p;
  p.tmpl = prompting::template_from_string(prompt_template);
  p.style_name = d.style_name;
  p.include_terms = include_terms;
  p.shot_order = prompting::shot_order_from_string(shot_order);
  return p;
}

eval::BleuConfig RunConfig::bleu_config() const {
  eval::BleuConfig b;
  b.max_order = static_cast<int>(bleu_max_order);
  b.case_sensitive = bleu_case_sensitive;
  return b;
}

const DomainConfig& RunConfig::domain(const std::string& name) const {
  for (const auto& d : domains) {
    if (d.domain.name == name) return d;
  }
  throw Error("config", "unknown domain " + name);
}

std::vector<std::pair<std::string, std::string>> read_synonyms_tsv(const std::filesystem::path& path) {
  return generation::read_rulebook_tsv(path.string());
}

}  // namespace stylepipe::config
