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

#include "xstab/modelclient.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "xstab/errors.h"
#include "xstab/http_backends.h"

namespace xstab {

std::string_view ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kClassifierEndpoint:
      return "classifier_endpoint";
    case ModelKind::kCompletionEndpoint:
      return "completion_endpoint";
    case ModelKind::kBuiltinToy:
      return "builtin_toy";
  }
  return "unknown";
}

ModelKind ParseModelKind(std::string_view name) {
  if (name == "classifier_endpoint") return ModelKind::kClassifierEndpoint;
  if (name == "completion_endpoint") return ModelKind::kCompletionEndpoint;
  if (name == "builtin_toy") return ModelKind::kBuiltinToy;
  throw ConfigError("unknown model kind: " + std::string(name));
}

void ModelHandle::Validate() const {
  if (name.empty()) throw ConfigError("model without a name");
  if (!(per_call_cost > 0.0) || !std::isfinite(per_call_cost)) {
    throw ConfigError("model " + name + ": per_call_cost must be positive");
  }
  switch (kind) {
    case ModelKind::kCompletionEndpoint:
      if (!prompt_template) {
        throw ConfigError("model " + name + ": completion models need a prompt_template");
      }
      if (prompt_template->find(kPromptSlot) == std::string::npos) {
        throw ConfigError("model " + name + ": prompt_template lacks the {x} slot");
      }
      if (label_surface_forms.size() != label_set.size()) {
        throw ConfigError("model " + name +
                          ": label_surface_forms must cover every label");
      }
      for (const auto& form : label_surface_forms) {
        if (form.empty()) {
          throw ConfigError("model " + name + ": empty label surface form");
        }
      }
      [[fallthrough]];
    case ModelKind::kClassifierEndpoint:
      if (base_url.empty()) {
        throw ConfigError("model " + name + ": endpoint models need a base_url");
      }
      break;
    case ModelKind::kBuiltinToy:
      if (label_set.size() != 2) {
        throw ConfigError("model " + name + ": builtin_toy needs exactly two labels");
      }
      break;
  }
}

std::string RenderPrompt(const ModelHandle& model, std::string_view instance_text) {
  if (!model.prompt_template) {
    throw ConfigError("model " + model.name + " has no prompt template");
  }
  const std::string& tpl = *model.prompt_template;
  const std::size_t pos = tpl.find(kPromptSlot);
  if (pos == std::string::npos) {
    throw ConfigError("prompt template of " + model.name + " lacks the {x} slot");
  }
  std::string out;
  out.reserve(tpl.size() + instance_text.size());
  out.append(tpl, 0, pos);
  out.append(instance_text);
  out.append(tpl, pos + kPromptSlot.size());
  return out;
}

double SequenceLogProb(std::span<const double> token_logprobs) {
  double sum = 0.0;
  for (double lp : token_logprobs) sum += lp;
  return sum;
}

std::vector<double> ExtractLabelProbsFromCompletion(
    const std::map<std::string, double, std::less<>>& candidate_logprobs,
    const LabelSet& labels, std::span<const std::string> label_surface_forms) {
  if (label_surface_forms.size() != labels.size()) {
    throw ConfigError("surface forms do not cover the label set");
  }
  std::vector<double> logprobs(labels.size());
  double max_lp = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < labels.size(); ++k) {
    auto it = candidate_logprobs.find(label_surface_forms[k]);
    if (it == candidate_logprobs.end()) {
      throw ProtocolError("endpoint did not score the surface form of label " +
                          labels.name(k));
    }
    if (std::isnan(it->second) || it->second > 0.0) {
      throw ProtocolError("invalid log-probability for label " + labels.name(k));
    }
    logprobs[k] = it->second;
    max_lp = std::max(max_lp, it->second);
  }
  if (!std::isfinite(max_lp)) {
    throw ProtocolError("no label received finite probability mass");
  }
  // exp(lp - max) keeps the ratio exact while avoiding underflow.
  std::vector<double> probs(labels.size());
  double total = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    probs[k] = std::exp(logprobs[k] - max_lp);
    total += probs[k];
  }
  for (double& p : probs) p /= total;
  return probs;
}

double Logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double ToyLogit(const Lexicon& lexicon, std::string_view text) {
  if (text == kEmptyMarker) return 0.0;
  double logit = 0.0;
  for (const auto& token : Tokenize(text)) {
    auto it = lexicon.find(NormalizeToken(token));
    if (it != lexicon.end()) logit += it->second;
  }
  return logit;
}

Prediction ToyPredict(const Lexicon& lexicon, std::string_view text) {
  const double p = Logistic(ToyLogit(lexicon, text));
  return Prediction({p, 1.0 - p});
}

Lexicon LoadToyLexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open toy lexicon " + path);
  Lexicon lexicon;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected word<TAB>weight");
    }
    const std::string word = NormalizeToken(line.substr(0, tab));
    double weight = 0.0;
    try {
      std::size_t used = 0;
      weight = std::stod(line.substr(tab + 1), &used);
    } catch (const std::exception&) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": bad weight");
    }
    if (!word.empty()) lexicon[word] = weight;
  }
  return lexicon;
}

std::string QueryCache::Key(std::string_view model, std::string_view query) {
  std::string key;
  key.reserve(model.size() + 1 + query.size());
  key.append(model);
  key.push_back('\0');
  key.append(query);
  return key;
}

std::optional<Prediction> QueryCache::Lookup(std::string_view model,
                                             std::string_view query) {
  {
    std::shared_lock lock(mu_);
    auto it = entries_.find(Key(model, query));
    if (it != entries_.end()) {
      ++hits_;
      return it->second;
    }
  }
  std::unique_lock lock(mu_);
  ++misses_;
  auto it = per_model_misses_.find(model);
  if (it == per_model_misses_.end()) {
    per_model_misses_.emplace(std::string(model), 1);
  } else {
    ++it->second;
  }
  return std::nullopt;
}

void QueryCache::Insert(std::string_view model, std::string_view query,
                        const Prediction& prediction) {
  std::unique_lock lock(mu_);
  entries_.insert_or_assign(Key(model, query), prediction);
}

std::uint64_t QueryCache::QueryCount(std::string_view model) const {
  std::shared_lock lock(mu_);
  auto it = per_model_misses_.find(model);
  return it == per_model_misses_.end() ? 0 : it->second;
}

std::size_t QueryCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

ModelClient::ModelClient(ModelHandle handle,
                         std::unique_ptr<PredictionBackend> backend,
                         std::shared_ptr<QueryCache> cache)
    : handle_(std::move(handle)),
      backend_(std::move(backend)),
      cache_(std::move(cache)) {
  if (!backend_) throw std::invalid_argument("ModelClient needs a backend");
}

Prediction ModelClient::Predict(std::string_view text) {
  if (Tokenize(text).empty()) {
    throw std::invalid_argument("predict: empty query text");
  }
  ++predict_calls_;
  const std::string query = handle_.kind == ModelKind::kCompletionEndpoint
                                ? RenderPrompt(handle_, text)
                                : std::string(text);
  if (cache_) {
    if (auto hit = cache_->Lookup(handle_.name, query)) return *hit;
  }
  ++backend_queries_;
  Prediction prediction = backend_->Query(query);
  if (prediction.probs().size() != handle_.label_set.size()) {
    throw ProtocolError("model " + handle_.name +
                        " returned a distribution of the wrong size");
  }
  if (cache_) cache_->Insert(handle_.name, query, prediction);
  return prediction;
}

std::unique_ptr<ModelClient> MakeModelClient(const ModelHandle& handle,
                                             std::shared_ptr<QueryCache> cache,
                                             const RetryPolicy& retry) {
  handle.Validate();
  std::unique_ptr<PredictionBackend> backend;
  switch (handle.kind) {
    case ModelKind::kBuiltinToy:
      backend = std::make_unique<ToyBackend>(handle.toy_lexicon);
      break;
    case ModelKind::kClassifierEndpoint:
      backend = std::make_unique<HttpClassifierBackend>(handle, retry);
      break;
    case ModelKind::kCompletionEndpoint:
      backend = std::make_unique<HttpCompletionBackend>(handle, retry);
      break;
  }
  return std::make_unique<ModelClient>(handle, std::move(backend),
                                       std::move(cache));
}

}  // namespace xstab
