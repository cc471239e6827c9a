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

#include "xstab/metrics.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <stdexcept>
#include <thread>

#include "xstab/errors.h"
#include "xstab/rng.h"

namespace xstab {
namespace {

void RequireOk(const RunRecord& record) {
  if (!record.ok()) {
    throw std::invalid_argument("metric requested on a non-ok record " +
                                record.case_id);
  }
}

std::vector<PairOutcome> OkOutcomes(std::span<const RunRecord> records) {
  std::vector<PairOutcome> out;
  for (const auto& r : records) {
    if (r.ok()) out.push_back(Summarize(r));
  }
  return out;
}

std::vector<std::size_t> Iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

double Evaluate(Statistic statistic, std::span<const RunRecord> records,
                const char* name) {
  const std::vector<PairOutcome> outcomes = OkOutcomes(records);
  if (outcomes.empty()) {
    throw UndefinedMetricError(std::string(name) + ": no ok records");
  }
  const auto all = Iota(outcomes.size());
  auto value = EvaluateStatistic(statistic, outcomes, all);
  if (!value) {
    throw UndefinedMetricError(std::string(name) + ": undefined on this set");
  }
  return *value;
}

// Smallest rank r (1-based) with r / n >= q.
std::size_t NearestRank(double q, std::size_t n) {
  const double r = std::ceil(q * static_cast<double>(n) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(r, 1.0)), 1, n);
}

}  // namespace

bool Flipped(const RunRecord& record) {
  RequireOk(record);
  return ToLowerAscii(record.original_top1->token) !=
         ToLowerAscii(record.perturbed_top1->token);
}

double TopKOverlap(const RunRecord& record, std::size_t k) {
  RequireOk(record);
  if (k == 0 || k > kStoredTopK) {
    throw std::invalid_argument("top-k overlap needs 1 <= k <= 5");
  }
  auto to_set = [k](const std::vector<std::string>& ranked) {
    std::set<std::string> s;
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
      s.insert(ToLowerAscii(ranked[i]));
    }
    return s;
  };
  const auto a = to_set(record.original_topk_tokens);
  const auto b = to_set(record.perturbed_topk_tokens);
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& t : a) inter += b.count(t);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

bool LabelConsistent(const RunRecord& record) {
  RequireOk(record);
  return record.original_pred->label == record.perturbed_pred->label;
}

PairOutcome Summarize(const RunRecord& record) {
  return {Flipped(record), LabelConsistent(record), TopKOverlap(record, 5)};
}

std::optional<double> EvaluateStatistic(Statistic statistic,
                                        std::span<const PairOutcome> outcomes,
                                        std::span<const std::size_t> sample) {
  std::size_t count = 0;
  double sum = 0.0;
  for (std::size_t i : sample) {
    const PairOutcome& o = outcomes[i];
    switch (statistic) {
      case Statistic::kFlipRate:
        sum += o.flipped;
        ++count;
        break;
      case Statistic::kTop5Overlap:
        sum += o.top5_overlap;
        ++count;
        break;
      case Statistic::kPredictionConsistency:
        sum += o.label_consistent;
        ++count;
        break;
      case Statistic::kPredConsistentFlipRate:
        if (o.label_consistent) {
          sum += o.flipped;
          ++count;
        }
        break;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

double FlipRate(std::span<const RunRecord> records) {
  return Evaluate(Statistic::kFlipRate, records, "flip_rate");
}

double MeanTopKOverlap(std::span<const RunRecord> records, std::size_t k) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : records) {
    if (!r.ok()) continue;
    sum += TopKOverlap(r, k);
    ++n;
  }
  if (n == 0) throw UndefinedMetricError("topk_overlap: no ok records");
  return sum / static_cast<double>(n);
}

double PredictionConsistency(std::span<const RunRecord> records) {
  return Evaluate(Statistic::kPredictionConsistency, records,
                  "prediction_consistency");
}

ConditionedRate PredConsistentFlipRate(std::span<const RunRecord> records) {
  std::size_t subset = 0;
  std::size_t flips = 0;
  for (const auto& r : records) {
    if (!r.ok() || !LabelConsistent(r)) continue;
    ++subset;
    flips += Flipped(r);
  }
  if (subset == 0) {
    throw UndefinedMetricError(
        "pred_consistent_flip_rate: no label-consistent ok records");
  }
  return {static_cast<double>(flips) / static_cast<double>(subset), subset};
}

ConfidenceInterval PairedBootstrapCi(std::size_t item_count,
                                     const ResampleStatistic& statistic,
                                     const BootstrapOptions& options) {
  if (item_count < 2) {
    throw UndefinedMetricError("bootstrap needs at least two paired items");
  }
  if (options.iterations == 0) throw std::invalid_argument("zero iterations");
  if (!(options.level > 0.0 && options.level < 1.0)) {
    throw std::invalid_argument("confidence level must be in (0, 1)");
  }
  const std::size_t iterations = options.iterations;
  const std::size_t redraw_cap = 10 * iterations;
  std::vector<double> values(iterations);
  std::atomic<std::size_t> redraws{0};
  std::atomic<bool> exhausted{false};

  auto run_range = [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> sample(item_count);
    for (std::size_t it = begin; it < end && !exhausted.load(); ++it) {
      const std::uint64_t iteration_seed = HashCombine(options.seed, it);
      for (std::uint64_t attempt = 0;; ++attempt) {
        Rng rng(HashCombine(iteration_seed, attempt));
        for (auto& idx : sample) idx = rng.UniformIndex(item_count);
        if (auto v = statistic(sample)) {
          values[it] = *v;
          break;
        }
        if (redraws.fetch_add(1) + 1 > redraw_cap) {
          exhausted = true;
          return;
        }
      }
    }
  };

  unsigned threads = options.threads ? options.threads
                                     : std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, iterations));
  if (threads <= 1) {
    run_range(0, iterations);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (iterations + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(iterations, begin + chunk);
      if (begin < end) pool.emplace_back(run_range, begin, end);
    }
  }
  if (exhausted) {
    throw UndefinedMetricError("bootstrap statistic undefined on too many resamples");
  }

  std::sort(values.begin(), values.end());
  const double alpha = (1.0 - options.level) / 2.0;
  return {values[NearestRank(alpha, iterations) - 1],
          values[NearestRank(1.0 - alpha, iterations) - 1]};
}

ConfidenceInterval PairedBootstrapCi(std::span<const RunRecord> records,
                                     Statistic statistic,
                                     const BootstrapOptions& options) {
  const std::vector<PairOutcome> outcomes = OkOutcomes(records);
  return PairedBootstrapCi(
      outcomes.size(),
      [&](std::span<const std::size_t> sample) {
        return EvaluateStatistic(statistic, outcomes, sample);
      },
      options);
}

std::string GroupKey::ToString() const {
  auto part = [](const std::optional<std::string>& v) { return v ? *v : "*"; };
  return part(model) + "/" + part(dataset) + "/" +
         (op ? std::string(OpTypeName(*op)) : "*") + "/" +
         (severity ? severity->Label() : "*");
}

MetricReport ComputeMetricReport(const GroupKey& key,
                                 std::span<const RunRecord> records,
                                 const BootstrapOptions& options) {
  const std::vector<PairOutcome> outcomes = OkOutcomes(records);
  if (outcomes.empty()) {
    throw UndefinedMetricError("no ok records for group " + key.ToString());
  }
  MetricReport report;
  report.key = key;
  report.n = outcomes.size();
  const auto all = Iota(outcomes.size());
  report.flip_rate = *EvaluateStatistic(Statistic::kFlipRate, outcomes, all);
  report.top5_overlap = *EvaluateStatistic(Statistic::kTop5Overlap, outcomes, all);
  report.prediction_consistency =
      *EvaluateStatistic(Statistic::kPredictionConsistency, outcomes, all);
  report.pred_consistent_flip_rate =
      EvaluateStatistic(Statistic::kPredConsistentFlipRate, outcomes, all);
  report.pred_consistent_n = static_cast<std::size_t>(
      std::count_if(outcomes.begin(), outcomes.end(),
                    [](const PairOutcome& o) { return o.label_consistent; }));

  if (outcomes.size() < 2) return report;
  auto ci_for = [&](Statistic statistic, double point, std::uint64_t salt) {
    BootstrapOptions opts = options;
    opts.seed = HashCombine(HashCombine(options.seed, HashString(key.ToString())), salt);
    ConfidenceInterval ci = PairedBootstrapCi(
        outcomes.size(),
        [&](std::span<const std::size_t> sample) {
          return EvaluateStatistic(statistic, outcomes, sample);
        },
        opts);
    ci.lower = std::min(ci.lower, point);
    ci.upper = std::max(ci.upper, point);
    return ci;
  };
  report.flip_rate_ci = ci_for(Statistic::kFlipRate, report.flip_rate, 1);
  if (report.pred_consistent_flip_rate) {
    try {
      report.pred_consistent_flip_rate_ci =
          ci_for(Statistic::kPredConsistentFlipRate,
                 *report.pred_consistent_flip_rate, 2);
    } catch (const UndefinedMetricError&) {
      // Too few label-consistent pairs for stable resampling; left unset.
    }
  }
  return report;
}

}  // namespace xstab
