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

#ifndef XSTAB_EXPLAIN_H_
#define XSTAB_EXPLAIN_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "xstab/core.h"
#include "xstab/modelclient.h"

namespace xstab {

enum class ExplainMethod { kLoo, kSurrogate };

std::string_view ExplainMethodName(ExplainMethod method);
ExplainMethod ParseExplainMethod(std::string_view name);

// Sampled-mask linear surrogate settings. A kernel_width of +infinity gives
// every sample weight one. With `exhaustive`, all 2^n masks are used once
// each and num_samples / mask_probability are ignored.
struct SurrogateParams {
  std::size_t num_samples = 200;
  double kernel_width = 0.75;
  double mask_probability = 0.5;
  bool exhaustive = false;

  static constexpr double kUniformKernel = std::numeric_limits<double>::infinity();
  static constexpr std::size_t kMaxExhaustiveWords = 16;
};

struct ExplanationRequest {
  ExplainMethod method = ExplainMethod::kLoo;
  // Present iff method == kSurrogate.
  std::optional<SurrogateParams> surrogate;
};

struct ExplainResult {
  Explanation explanation;
  // Prediction on the full input; its argmax is the class whose probability
  // every score tracks.
  Prediction prediction;
  // Predict() calls issued, cache hits included.
  std::size_t predict_calls = 0;
  // Surrogate only: the normal equations were singular and a 1e-6 ridge
  // term was added.
  bool ridge_fallback = false;
};

// Words with index `i` removed, single-space joined; kEmptyMarker when
// nothing is left.
std::string OccludedText(std::span<const std::string> words, std::size_t i);

// Leave-one-out occlusion: score[i] = P(c | x) - P(c | x without word i),
// c = argmax of the full-input prediction. Issues n + 1 Predict() calls.
ExplainResult ExplainLoo(ModelClient& model, const Document& document);

// Weighted least squares from keep-masks to P(c | masked text), with kernel
// exp(-(1 - kept/n)^2 / width^2); scores are the fitted coefficients.
ExplainResult ExplainSurrogate(ModelClient& model, const Document& document,
                               const SurrogateParams& params, std::uint64_t seed);

// Dispatches on request.method. `seed` only matters for the surrogate.
ExplainResult Explain(ModelClient& model, const Document& document,
                      const ExplanationRequest& request, std::uint64_t seed);

// n + 1 model queries per explained instance. n must be positive.
std::size_t ExplanationQueryCost(std::size_t word_count);

}  // namespace xstab

#endif  // XSTAB_EXPLAIN_H_
