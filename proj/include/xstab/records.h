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

#ifndef XSTAB_RECORDS_H_
#define XSTAB_RECORDS_H_

#include <cstddef>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "xstab/perturb.h"

namespace xstab {

enum class RecordStatus { kOk, kSkipped, kFailed };

struct PredictionSummary {
  std::string label;
  double confidence = 0.0;
  friend bool operator==(const PredictionSummary&, const PredictionSummary&) = default;
};

struct Top1Summary {
  std::size_t index = 0;
  std::string token;
  double score = 0.0;
  friend bool operator==(const Top1Summary&, const Top1Summary&) = default;
};

// One evaluated (model, paired case): the atom every metric folds over.
// Mirrors one line of records.jsonl.
struct RunRecord {
  std::string model;
  std::string case_id;
  OpType op = OpType::kCharSwap;
  Severity severity = Severity::k05;
  RecordStatus status = RecordStatus::kOk;
  // Why the case was skipped or failed.
  std::string reason;
  std::string original_text;
  std::string perturbed_text;
  std::optional<PredictionSummary> original_pred;
  std::optional<PredictionSummary> perturbed_pred;
  std::optional<Top1Summary> original_top1;
  std::optional<Top1Summary> perturbed_top1;
  // Lowercased tokens of the first min(5, n) ranks, in rank order.
  std::vector<std::string> original_topk_tokens;
  std::vector<std::string> perturbed_topk_tokens;
  std::size_t query_count = 0;

  bool ok() const { return status == RecordStatus::kOk; }
  // case_id without its "|op@severity" suffix.
  std::string document_id() const;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

inline constexpr std::size_t kStoredTopK = 5;

// "ok", "skipped:<reason>", "failed:<reason>".
std::string StatusString(const RunRecord& record);

nlohmann::json RecordToJson(const RunRecord& record);
// Throws std::invalid_argument on a malformed object.
RunRecord RecordFromJson(const nlohmann::json& j);
// Single line, no trailing newline.
std::string SerializeRecord(const RunRecord& record);

// Reads every complete line of a records file. A final line without a
// newline (an interrupted write) is ignored; `valid_bytes`, when given,
// receives the length of the well-formed prefix.
std::vector<RunRecord> ReadRecords(const std::string& path,
                                   std::size_t* valid_bytes = nullptr);

// Keeps the last record per (model, case_id) and sorts by that key.
std::vector<RunRecord> CanonicalRecords(std::vector<RunRecord> records);

// Append-only, single-writer JSONL sink. Each Append() is flushed before it
// returns so a crash loses at most the line being written.
class RecordWriter {
 public:
  // Truncates `path` to `keep_bytes` first, dropping a torn final line.
  RecordWriter(const std::string& path, std::size_t keep_bytes);
  void Append(const RunRecord& record);

 private:
  std::mutex mu_;
  std::ofstream out_;
};

}  // namespace xstab

#endif  // XSTAB_RECORDS_H_
