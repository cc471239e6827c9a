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

#ifndef XSTAB_RUNNER_H_
#define XSTAB_RUNNER_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "xstab/config.h"
#include "xstab/explain.h"
#include "xstab/perturb.h"
#include "xstab/records.h"

namespace xstab {

// File names inside a run directory.
inline constexpr const char* kConfigFile = "config.json";
inline constexpr const char* kCasesFile = "cases.jsonl";
inline constexpr const char* kRecordsFile = "records.jsonl";
inline constexpr const char* kReportFile = "report.json";
inline constexpr const char* kPlotDataDir = "plotdata";

// Dataset ingestion, sampling and grid construction, without any model.
struct PreparedRun {
  std::vector<Document> documents;
  std::size_t dropped_documents = 0;
  std::size_t admitted_documents = 0;
  PerturbationGrid grid;
};

PreparedRun PrepareRun(const RunConfig& config);

nlohmann::json PairedCaseToJson(const PairedCase& c);
nlohmann::json SkippedCaseToJson(const SkippedCase& c);

// Predicts and explains both sides of one case through `model`.
RunRecord EvaluateCase(ModelClient& model, const PairedCase& paired,
                       const ExplanationRequest& request,
                       std::uint64_t global_seed);

struct RunOptions {
  // Stop (as if killed) once this many new records have been written.
  std::optional<std::size_t> stop_after_records;
  // Skip report emission at the end.
  bool skip_report = false;
};

struct RunSummary {
  std::string run_dir;
  std::size_t expected = 0;  // |grid cells x documents| x |models|
  std::size_t ok = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
  // Records written by this invocation.
  std::size_t written = 0;
  // Cases that reached a model backend in this invocation.
  std::size_t evaluated = 0;
  bool interrupted = false;
  std::vector<std::string> aborted_models;
};

// Runs the whole pipeline into config.output_dir, resuming any records
// already there. Completed (model, case) pairs are those with an ok or
// skipped record; failed ones are retried.
RunSummary ExecuteRun(const RunConfig& config, const RunOptions& options = {});

// Builds the report document from canonical records.
nlohmann::json BuildReport(const RunConfig& config,
                           const std::vector<RunRecord>& records,
                           const std::vector<nlohmann::json>& cases);

// Reads a run directory and writes report.json and plotdata/*.csv. Throws
// UndefinedMetricError if the run has no ok record.
void EmitReport(const std::string& run_dir);

}  // namespace xstab

#endif  // XSTAB_RUNNER_H_
