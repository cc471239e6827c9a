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

#ifndef XSTAB_METRICS_H_
#define XSTAB_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xstab/records.h"

namespace xstab {

// Top-1 tokens differ, compared as lowercased strings (positions ignored).
// Requires an ok record (std::invalid_argument otherwise).
bool Flipped(const RunRecord& record);

// Jaccard similarity of the top-k token sets; 1 when both are empty.
// k must not exceed kStoredTopK.
double TopKOverlap(const RunRecord& record, std::size_t k = kStoredTopK);

// Original and perturbed predicted labels agree. Requires an ok record.
bool LabelConsistent(const RunRecord& record);

// The folds below use only ok records and throw UndefinedMetricError when
// there are none.
double FlipRate(std::span<const RunRecord> records);
double MeanTopKOverlap(std::span<const RunRecord> records,
                       std::size_t k = kStoredTopK);
double PredictionConsistency(std::span<const RunRecord> records);

struct ConditionedRate {
  double rate = 0.0;
  std::size_t subset_size = 0;
};

// Flip rate over the label-consistent ok records. Throws
// UndefinedMetricError when that subset is empty.
ConditionedRate PredConsistentFlipRate(std::span<const RunRecord> records);

// Per-record quantities every statistic is built from.
struct PairOutcome {
  bool flipped = false;
  bool label_consistent = false;
  double top5_overlap = 0.0;
};

PairOutcome Summarize(const RunRecord& record);

enum class Statistic {
  kFlipRate,
  kTop5Overlap,
  kPredictionConsistency,
  kPredConsistentFlipRate,
};

// Statistic over outcomes[sample[0]], outcomes[sample[1]], ...; nullopt when
// undefined on that sample (empty subset).
std::optional<double> EvaluateStatistic(Statistic statistic,
                                        std::span<const PairOutcome> outcomes,
                                        std::span<const std::size_t> sample);

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  friend bool operator==(const ConfidenceInterval&, const ConfidenceInterval&) = default;
};

struct BootstrapOptions {
  std::size_t iterations = 10000;
  double level = 0.95;
  std::uint64_t seed = 0;
  // 0 = hardware concurrency. Results do not depend on this value.
  unsigned threads = 0;
};

// Statistic on a resample given as indices into the original items.
using ResampleStatistic =
    std::function<std::optional<double>(std::span<const std::size_t>)>;

// Percentile bootstrap over `item_count` paired items resampled whole with
// replacement. Interval ends are nearest-rank percentiles at (1-level)/2 and
// (1+level)/2. Resample i draws from a generator seeded by (seed, i), so the
// result is independent of threading. Resamples on which the statistic is
// undefined are redrawn; more than 10 * iterations redraws in total raise
// UndefinedMetricError. Needs item_count >= 2.
ConfidenceInterval PairedBootstrapCi(std::size_t item_count,
                                     const ResampleStatistic& statistic,
                                     const BootstrapOptions& options);

// Convenience overload over the ok records of `records`.
ConfidenceInterval PairedBootstrapCi(std::span<const RunRecord> records,
                                     Statistic statistic,
                                     const BootstrapOptions& options);

// Unset fields are marginalized over.
struct GroupKey {
  std::optional<std::string> model;
  std::optional<std::string> dataset;
  std::optional<OpType> op;
  std::optional<Severity> severity;

  std::string ToString() const;
};

struct MetricReport {
  GroupKey key;
  std::size_t n = 0;
  double flip_rate = 0.0;
  std::optional<ConfidenceInterval> flip_rate_ci;
  double top5_overlap = 0.0;
  double prediction_consistency = 0.0;
  std::optional<double> pred_consistent_flip_rate;
  std::optional<ConfidenceInterval> pred_consistent_flip_rate_ci;
  std::size_t pred_consistent_n = 0;
};

// Metrics over the ok records of `records`. CIs are omitted below two ok
// records; each group bootstraps with a seed derived from options.seed and
// the group key. Intervals are widened to include the point estimate when a
// skewed resample distribution would exclude it. Throws UndefinedMetricError
// without ok records.
MetricReport ComputeMetricReport(const GroupKey& key,
                                 std::span<const RunRecord> records,
                                 const BootstrapOptions& options);

}  // namespace xstab

#endif  // XSTAB_METRICS_H_
