// Copyright 2026 The xstab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "xstab/config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "xstab/errors.h"
#include "xstab/rng.h"

namespace xstab {
namespace {

using nlohmann::json;

std::string Resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return p;
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal().string();
}

template <typename T>
T Get(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field \"") + key + "\" has the wrong type");
  }
}

template <typename T>
T Require(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) {
    throw ConfigError(std::string("config field \"") + key + "\" is required");
  }
  return Get<T>(j, key, T{});
}

DictionaryTranslator::Table ParseTable(const json& j, const char* key) {
  DictionaryTranslator::Table table;
  if (!j.contains(key)) return table;
  for (const auto& [from, to] : j[key].items()) {
    table[ToLowerAscii(from)] = to.get<std::string>();
  }
  return table;
}

ModelHandle ParseModel(const json& m, const std::filesystem::path& base) {
  ModelHandle h;
  h.name = Require<std::string>(m, "name");
  h.kind = ParseModelKind(Require<std::string>(m, "kind"));
  try {
    h.label_set = LabelSet(Require<std::vector<std::string>>(m, "labels"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("model " + h.name + ": " + e.what());
  }
  h.per_call_cost = Get<double>(m, "per_call_cost", 1.0);
  h.base_url = Get<std::string>(m, "base_url", "");
  h.bearer_token_env = Get<std::string>(m, "bearer_token_env", "");
  if (m.contains("prompt_template") && !m["prompt_template"].is_null()) {
    h.prompt_template = m["prompt_template"].get<std::string>();
  }
  if (m.contains("label_surface_forms")) {
    const json& forms = m["label_surface_forms"];
    if (forms.is_object()) {
      for (const auto& label : h.label_set.names()) {
        if (!forms.contains(label)) {
          throw ConfigError("model " + h.name + ": no surface form for label " + label);
        }
        h.label_surface_forms.push_back(forms[label].get<std::string>());
      }
    } else {
      h.label_surface_forms = forms.get<std::vector<std::string>>();
    }
  }
  if (m.contains("scale") && !m["scale"].is_null()) h.scale = m["scale"].get<double>();
  if (m.contains("lexicon_path")) {
    h.toy_lexicon = LoadToyLexicon(Resolve(base, m["lexicon_path"].get<std::string>()));
  }
  if (m.contains("lexicon")) {
    for (const auto& [word, weight] : m["lexicon"].items()) {
      h.toy_lexicon[NormalizeToken(word)] = weight.get<double>();
    }
  }
  return h;
}

}  // namespace

void RunConfig::Validate() const {
  if (dataset.path.empty()) throw ConfigError("dataset.path is required");
  if (models.empty()) throw ConfigError("at least one model is required");
  std::set<std::string> names;
  for (const auto& m : models) {
    m.Validate();
    if (!names.insert(m.name).second) {
      throw ConfigError("duplicate model name " + m.name);
    }
  }
  if (cells.empty()) throw ConfigError("perturbation grid is empty");
  if (sample_size == 0) throw ConfigError("sample_size must be positive");
  if (bootstrap_iterations == 0) throw ConfigError("bootstrap iterations must be positive");
  if (!(bootstrap_level > 0.0 && bootstrap_level < 1.0)) {
    throw ConfigError("bootstrap level must be in (0, 1)");
  }
  if (concurrency == 0) throw ConfigError("concurrency must be positive");
  if (explainer.method == ExplainMethod::kSurrogate && !explainer.surrogate) {
    throw ConfigError("surrogate explainer without parameters");
  }
  if (translator.kind != "identity" && translator.kind != "dictionary" &&
      translator.kind != "http") {
    throw ConfigError("unknown translator kind " + translator.kind);
  }
  if (translator.kind == "http" && translator.base_url.empty()) {
    throw ConfigError("http translator needs a base_url");
  }
  tiers.Validate();
}

BootstrapOptions RunConfig::bootstrap() const {
  BootstrapOptions o;
  o.iterations = bootstrap_iterations;
  o.level = bootstrap_level;
  o.seed = HashCombine(global_seed, HashString("bootstrap"));
  return o;
}

RunConfig ParseRunConfig(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  c.global_seed = Get<std::uint64_t>(j, "global_seed", 0);

  const json dataset = Get<json>(j, "dataset", json::object());
  c.dataset.path = Resolve(base_dir, Require<std::string>(dataset, "path"));
  c.dataset.format = ParseDatasetFormat(Get<std::string>(dataset, "format", "jsonl"));
  const std::string delim = Get<std::string>(dataset, "delimiter", ",");
  if (delim.size() != 1) throw ConfigError("dataset.delimiter must be one character");
  c.dataset.delimiter = delim[0];
  c.dataset.name = Get<std::string>(
      dataset, "name", std::filesystem::path(c.dataset.path).stem().string());

  c.sample_size = Get<std::size_t>(j, "sample_size", 200);

  for (const auto& m : Get<json>(j, "models", json::array())) {
    c.models.push_back(ParseModel(m, base_dir));
  }

  if (j.contains("perturbations")) {
    const json& p = j["perturbations"];
    std::vector<OpType> ops(kAllOpTypes.begin(), kAllOpTypes.end());
    std::vector<Severity> sevs(kAllSeverities.begin(), kAllSeverities.end());
    if (p.contains("ops")) {
      ops.clear();
      for (const auto& op : p["ops"]) ops.push_back(ParseOpType(op.get<std::string>()));
    }
    if (p.contains("severities")) {
      sevs.clear();
      for (const auto& s : p["severities"]) {
        sevs.push_back(Severity::FromFraction(s.get<double>()));
      }
    }
    c.cells.clear();
    for (OpType op : ops) {
      for (Severity s : sevs) c.cells.push_back({op, s});
    }
  }

  const json explainer = Get<json>(j, "explainer", json::object());
  c.explainer.method = ParseExplainMethod(Get<std::string>(explainer, "method", "loo"));
  if (c.explainer.method == ExplainMethod::kSurrogate) {
    SurrogateParams sp;
    sp.num_samples = Get<std::size_t>(explainer, "num_samples", sp.num_samples);
    if (explainer.contains("kernel_width") &&
        explainer["kernel_width"] == "uniform") {
      sp.kernel_width = SurrogateParams::kUniformKernel;
    } else {
      sp.kernel_width = Get<double>(explainer, "kernel_width", sp.kernel_width);
    }
    sp.mask_probability = Get<double>(explainer, "mask_probability", sp.mask_probability);
    sp.exhaustive = Get<bool>(explainer, "exhaustive", false);
    c.explainer.surrogate = sp;
  }

  const json bootstrap = Get<json>(j, "bootstrap", json::object());
  c.bootstrap_iterations = Get<std::size_t>(bootstrap, "iterations", 10000);
  c.bootstrap_level = Get<double>(bootstrap, "level", 0.95);

  c.lexicon_path = Resolve(base_dir, Get<std::string>(j, "lexicon_path", ""));

  const json mt = Get<json>(j, "translator", json::object());
  c.translator.kind = Get<std::string>(mt, "kind", "identity");
  c.translator.base_url = Get<std::string>(mt, "base_url", "");
  c.translator.bearer_token_env = Get<std::string>(mt, "bearer_token_env", "");
  c.translator.en_de = ParseTable(mt, "en_de");
  c.translator.de_en = ParseTable(mt, "de_en");

  c.output_dir = Resolve(base_dir, Get<std::string>(j, "output_dir", "run"));
  c.concurrency = Get<unsigned>(j, "concurrency", 4);

  const json tiers = Get<json>(j, "tiers", json::object());
  c.tiers.regulatory_below = Get<double>(tiers, "regulatory_below", 0.10);
  c.tiers.balanced_below = Get<double>(tiers, "balanced_below", 0.20);

  const json retry = Get<json>(j, "retry", json::object());
  c.retry.max_retries = Get<int>(retry, "max_retries", 3);
  c.retry.base_delay = std::chrono::milliseconds(Get<long>(retry, "base_delay_ms", 250));
  c.retry.timeout = std::chrono::milliseconds(Get<long>(retry, "timeout_ms", 30000));

  c.Validate();
  return c;
}

json ResultConfigJson(const json& config_json) {
  json j = config_json;
  for (const char* key : {"output_dir", "concurrency", "retry"}) j.erase(key);
  return j;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  const auto base = std::filesystem::absolute(path).parent_path();
  return ParseRunConfig(j, base);
}

json ConfigToJson(const RunConfig& c) {
  json j;
  j["global_seed"] = c.global_seed;
  j["dataset"] = {{"path", c.dataset.path},
                  {"format", std::string(DatasetFormatName(c.dataset.format))},
                  {"delimiter", std::string(1, c.dataset.delimiter)},
                  {"name", c.dataset.name}};
  j["sample_size"] = c.sample_size;
  json models = json::array();
  for (const auto& m : c.models) {
    json e;
    e["name"] = m.name;
    e["kind"] = std::string(ModelKindName(m.kind));
    e["labels"] = m.label_set.names();
    e["per_call_cost"] = m.per_call_cost;
    if (!m.base_url.empty()) e["base_url"] = m.base_url;
    if (!m.bearer_token_env.empty()) e["bearer_token_env"] = m.bearer_token_env;
    if (m.prompt_template) e["prompt_template"] = *m.prompt_template;
    if (!m.label_surface_forms.empty()) e["label_surface_forms"] = m.label_surface_forms;
    if (m.scale) e["scale"] = *m.scale;
    if (!m.toy_lexicon.empty()) {
      json lex = json::object();
      for (const auto& [w, v] : m.toy_lexicon) lex[w] = v;
      e["lexicon"] = lex;
    }
    models.push_back(e);
  }
  j["models"] = models;
  // Cells are always the product of an op list and a severity list.
  std::vector<std::string> ops;
  std::vector<double> sevs;
  for (const auto& cell : c.cells) {
    const std::string op(OpTypeName(cell.op));
    if (std::find(ops.begin(), ops.end(), op) == ops.end()) ops.push_back(op);
    if (std::find(sevs.begin(), sevs.end(), cell.severity.fraction()) == sevs.end()) {
      sevs.push_back(cell.severity.fraction());
    }
  }
  j["perturbations"] = {{"ops", ops}, {"severities", sevs}};
  json ex = {{"method", std::string(ExplainMethodName(c.explainer.method))}};
  if (c.explainer.surrogate) {
    const auto& sp = *c.explainer.surrogate;
    ex["num_samples"] = sp.num_samples;
    ex["kernel_width"] =
        std::isinf(sp.kernel_width) ? json("uniform") : json(sp.kernel_width);
    ex["mask_probability"] = sp.mask_probability;
    ex["exhaustive"] = sp.exhaustive;
  }
  j["explainer"] = ex;
  j["bootstrap"] = {{"iterations", c.bootstrap_iterations}, {"level", c.bootstrap_level}};
  j["lexicon_path"] = c.lexicon_path;
  json mt = {{"kind", c.translator.kind}};
  if (!c.translator.base_url.empty()) mt["base_url"] = c.translator.base_url;
  if (!c.translator.bearer_token_env.empty()) {
    mt["bearer_token_env"] = c.translator.bearer_token_env;
  }
  if (!c.translator.en_de.empty()) mt["en_de"] = c.translator.en_de;
  if (!c.translator.de_en.empty()) mt["de_en"] = c.translator.de_en;
  j["translator"] = mt;
  j["output_dir"] = c.output_dir;
  j["concurrency"] = c.concurrency;
  j["tiers"] = {{"regulatory_below", c.tiers.regulatory_below},
                {"balanced_below", c.tiers.balanced_below}};
  j["retry"] = {{"max_retries", c.retry.max_retries},
                {"base_delay_ms", c.retry.base_delay.count()},
                {"timeout_ms", c.retry.timeout.count()}};
  return j;
}

std::unique_ptr<Translator> MakeTranslator(const TranslatorConfig& config,
                                           const RetryPolicy& retry) {
  if (config.kind == "identity") return std::make_unique<IdentityTranslator>();
  if (config.kind == "dictionary") {
    return std::make_unique<DictionaryTranslator>(config.en_de, config.de_en);
  }
  if (config.kind == "http") {
    return std::make_unique<HttpTranslator>(config.base_url, retry,
                                            config.bearer_token_env);
  }
  throw ConfigError("unknown translator kind " + config.kind);
}

SynonymLexicon LoadLexiconFor(const RunConfig& config) {
  if (config.lexicon_path.empty()) return {};
  return SynonymLexicon::Load(config.lexicon_path);
}

}  // namespace xstab
