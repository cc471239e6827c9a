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

#ifndef XSTAB_MODELCLIENT_H_
#define XSTAB_MODELCLIENT_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xstab/core.h"

namespace xstab {

// Sent in place of an empty occlusion (a one-word document with its only
// word removed). The builtin toy model scores it as a zero logit.
inline constexpr std::string_view kEmptyMarker = "[EMPTY]";

// Instance-text slot in completion prompt templates.
inline constexpr std::string_view kPromptSlot = "{x}";

enum class ModelKind { kClassifierEndpoint, kCompletionEndpoint, kBuiltinToy };

std::string_view ModelKindName(ModelKind kind);
// Throws ConfigError.
ModelKind ParseModelKind(std::string_view name);

// Signed word weights for the builtin toy model, keyed by normalized token.
using Lexicon = std::map<std::string, double, std::less<>>;

struct ModelHandle {
  std::string name;
  ModelKind kind = ModelKind::kBuiltinToy;
  LabelSet label_set{{"pos", "neg"}};
  // Completion models only.
  std::optional<std::string> prompt_template;
  // Completion models only; aligned with label_set.
  std::vector<std::string> label_surface_forms;
  // Relative per-call inference cost; BERT-base = 1.
  double per_call_cost = 1.0;
  // Endpoint models only.
  std::string base_url;
  // Name of the environment variable holding a bearer token, if any.
  std::string bearer_token_env;
  // Builtin toy only.
  Lexicon toy_lexicon;
  // Parameter count in billions; only used to lay out scale plots.
  std::optional<double> scale;

  // Throws ConfigError when the handle is incomplete for its kind.
  void Validate() const;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_delay{250};
  std::chrono::milliseconds timeout{30000};
};

// Substitutes `instance_text` into the template slot. Throws ConfigError if
// the handle has no template or the template lacks the slot.
std::string RenderPrompt(const ModelHandle& model, std::string_view instance_text);

// Sum of per-token log-probabilities of one surface form.
double SequenceLogProb(std::span<const double> token_logprobs);

// Maps summed sequence log-probabilities of each label's surface form to a
// distribution renormalized over the label set. Throws ProtocolError naming
// the label whose surface form was not scored, or when no label has finite
// mass.
std::vector<double> ExtractLabelProbsFromCompletion(
    const std::map<std::string, double, std::less<>>& candidate_logprobs,
    const LabelSet& labels, std::span<const std::string> label_surface_forms);

double Logistic(double x);

// Logit = sum of lexicon weights over tokens; P(label 0) = logistic(logit).
// Requires a binary label set (the caller's responsibility).
double ToyLogit(const Lexicon& lexicon, std::string_view text);
Prediction ToyPredict(const Lexicon& lexicon, std::string_view text);

// Reads `word<TAB>weight` lines; '#' starts a comment line.
Lexicon LoadToyLexicon(const std::string& path);

// Thread-safe memo of (model name, exact query string) -> Prediction.
class QueryCache {
 public:
  std::optional<Prediction> Lookup(std::string_view model, std::string_view query);
  void Insert(std::string_view model, std::string_view query,
              const Prediction& prediction);

  std::uint64_t hits() const { return hits_.load(); }
  std::uint64_t misses() const { return misses_.load(); }
  // Cache misses attributed to one model, i.e. true API calls.
  std::uint64_t QueryCount(std::string_view model) const;
  std::size_t size() const;

 private:
  static std::string Key(std::string_view model, std::string_view query);

  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, Prediction> entries_;
  std::map<std::string, std::uint64_t, std::less<>> per_model_misses_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
};

// The wire-level half of a model: turns one exact query string into a
// distribution. Implementations must be safe for concurrent calls.
class PredictionBackend {
 public:
  virtual ~PredictionBackend() = default;
  virtual Prediction Query(const std::string& query) = 0;
};

class ToyBackend : public PredictionBackend {
 public:
  explicit ToyBackend(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}
  Prediction Query(const std::string& query) override {
    return ToyPredict(lexicon_, query);
  }

 private:
  Lexicon lexicon_;
};

// The only channel through which the rest of the toolkit observes a model.
class ModelClient {
 public:
  ModelClient(ModelHandle handle, std::unique_ptr<PredictionBackend> backend,
              std::shared_ptr<QueryCache> cache = nullptr);

  const ModelHandle& handle() const { return handle_; }
  const std::string& name() const { return handle_.name; }

  // `text` must be non-empty after whitespace normalization
  // (std::invalid_argument otherwise). Completion models see the rendered
  // prompt; the cache is keyed on that rendered string.
  Prediction Predict(std::string_view text);

  // Calls to Predict.
  std::uint64_t predict_calls() const { return predict_calls_.load(); }
  // Calls that reached the backend (cache misses).
  std::uint64_t backend_queries() const { return backend_queries_.load(); }

 private:
  ModelHandle handle_;
  std::unique_ptr<PredictionBackend> backend_;
  std::shared_ptr<QueryCache> cache_;
  std::atomic<std::uint64_t> predict_calls_{0};
  std::atomic<std::uint64_t> backend_queries_{0};
};

// Builds the backend matching handle.kind. Throws ConfigError.
std::unique_ptr<ModelClient> MakeModelClient(const ModelHandle& handle,
                                             std::shared_ptr<QueryCache> cache,
                                             const RetryPolicy& retry = {});

}  // namespace xstab

#endif  // XSTAB_MODELCLIENT_H_
