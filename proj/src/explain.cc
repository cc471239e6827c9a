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

#include "xstab/explain.h"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "xstab/errors.h"
#include "xstab/rng.h"

namespace xstab {
namespace {

constexpr double kRidge = 1e-6;

std::string MaskedText(std::span<const std::string> words,
                       const std::vector<bool>& keep) {
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (keep[i]) kept.push_back(words[i]);
  }
  if (kept.empty()) return std::string(kEmptyMarker);
  return Detokenize(kept);
}

struct WeightedFit {
  Eigen::VectorXd coefficients;
  bool ridge = false;
};

// Least squares with an unpenalized intercept, solved on weighted-centered
// data. Constant mask columns center to zero, so under the ridge fallback
// their coefficients come out exactly 0.
WeightedFit FitWeightedLinear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& w) {
  const double total = w.sum();
  const Eigen::RowVectorXd x_mean = (w.transpose() * x) / total;
  const double y_mean = w.dot(y) / total;
  const Eigen::MatrixXd xc = x.rowwise() - x_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;

  Eigen::MatrixXd normal = xc.transpose() * w.asDiagonal() * xc;
  const Eigen::VectorXd rhs = xc.transpose() * w.asDiagonal() * yc;

  WeightedFit fit;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
  if (lu.rank() < normal.cols()) {
    fit.ridge = true;
    normal.diagonal().array() += kRidge;
    fit.coefficients = normal.ldlt().solve(rhs);
  } else {
    fit.coefficients = lu.solve(rhs);
  }
  return fit;
}

}  // namespace

std::string_view ExplainMethodName(ExplainMethod method) {
  return method == ExplainMethod::kLoo ? "loo" : "surrogate";
}

ExplainMethod ParseExplainMethod(std::string_view name) {
  if (name == "loo") return ExplainMethod::kLoo;
  if (name == "surrogate" || name == "lime") return ExplainMethod::kSurrogate;
  throw ConfigError("unknown explainer: " + std::string(name));
}

std::string OccludedText(std::span<const std::string> words, std::size_t i) {
  std::vector<bool> keep(words.size(), true);
  keep.at(i) = false;
  return MaskedText(words, keep);
}

ExplainResult ExplainLoo(ModelClient& model, const Document& document) {
  const auto& words = document.words();
  if (words.empty()) throw std::invalid_argument("cannot explain an empty document");

  Prediction full = model.Predict(document.NormalizedText());
  const std::size_t target = full.predicted_index();
  const double base = full.prob(target);
  std::vector<double> scores(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    scores[i] = base - model.Predict(OccludedText(words, i)).prob(target);
  }
  return ExplainResult{Explanation(words, std::move(scores)), std::move(full),
                       words.size() + 1, false};
}

ExplainResult ExplainSurrogate(ModelClient& model, const Document& document,
                               const SurrogateParams& params, std::uint64_t seed) {
  const auto& words = document.words();
  const std::size_t n = words.size();
  if (n == 0) throw std::invalid_argument("cannot explain an empty document");
  if (!(params.kernel_width > 0.0)) {
    throw std::invalid_argument("kernel_width must be positive");
  }

  std::vector<std::vector<bool>> masks;
  if (params.exhaustive) {
    if (n > SurrogateParams::kMaxExhaustiveWords) {
      throw std::invalid_argument("exhaustive masks limited to " +
                                  std::to_string(SurrogateParams::kMaxExhaustiveWords) +
                                  " words");
    }
    // All-ones first so the first query is the full input.
    const std::size_t count = std::size_t{1} << n;
    for (std::size_t m = count; m-- > 0;) {
      std::vector<bool> keep(n);
      for (std::size_t i = 0; i < n; ++i) keep[i] = (m >> i) & 1U;
      masks.push_back(std::move(keep));
    }
  } else {
    if (params.num_samples < n + 2) {
      throw std::invalid_argument("surrogate needs num_samples >= n + 2");
    }
    if (params.mask_probability < 0.0 || params.mask_probability > 1.0) {
      throw std::invalid_argument("mask_probability outside [0, 1]");
    }
    Rng rng(seed);
    masks.emplace_back(n, true);
    while (masks.size() < params.num_samples) {
      std::vector<bool> keep(n);
      for (std::size_t i = 0; i < n; ++i) keep[i] = rng.Bernoulli(params.mask_probability);
      masks.push_back(std::move(keep));
    }
  }

  Prediction full = model.Predict(document.NormalizedText());
  const std::size_t target = full.predicted_index();

  const auto m = static_cast<Eigen::Index>(masks.size());
  Eigen::MatrixXd x(m, static_cast<Eigen::Index>(n));
  Eigen::VectorXd y(m);
  Eigen::VectorXd w(m);
  const bool uniform = std::isinf(params.kernel_width);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& keep = masks[static_cast<std::size_t>(r)];
    std::size_t kept = 0;
    for (std::size_t i = 0; i < n; ++i) {
      x(r, static_cast<Eigen::Index>(i)) = keep[i] ? 1.0 : 0.0;
      kept += keep[i];
    }
    y(r) = r == 0 ? full.prob(target)
                  : model.Predict(MaskedText(words, keep)).prob(target);
    const double distance = 1.0 - static_cast<double>(kept) / static_cast<double>(n);
    w(r) = uniform ? 1.0
                   : std::exp(-(distance * distance) /
                              (params.kernel_width * params.kernel_width));
  }

  WeightedFit fit = FitWeightedLinear(x, y, w);
  std::vector<double> scores(fit.coefficients.data(),
                             fit.coefficients.data() + fit.coefficients.size());
  return ExplainResult{Explanation(words, std::move(scores)), std::move(full),
                       masks.size(), fit.ridge};
}

ExplainResult Explain(ModelClient& model, const Document& document,
                      const ExplanationRequest& request, std::uint64_t seed) {
  if (request.method == ExplainMethod::kLoo) return ExplainLoo(model, document);
  if (!request.surrogate) {
    throw std::invalid_argument("surrogate explanation without parameters");
  }
  return ExplainSurrogate(model, document, *request.surrogate, seed);
}

std::size_t ExplanationQueryCost(std::size_t word_count) {
  if (word_count == 0) throw std::invalid_argument("word count must be positive");
  return word_count + 1;
}

}  // namespace xstab
