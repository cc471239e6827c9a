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

#include "xstab/runner.h"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include "xstab/errors.h"
#include "xstab/rng.h"

namespace xstab {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

RunRecord BaseRecord(const std::string& model, const std::string& case_id,
                     OpType op, Severity severity) {
  RunRecord r;
  r.model = model;
  r.case_id = case_id;
  r.op = op;
  r.severity = severity;
  return r;
}

RunRecord FailedRecord(const std::string& model, const PairedCase& c,
                       const std::string& reason) {
  RunRecord r = BaseRecord(model, c.case_id(), c.config.op, c.config.severity);
  r.status = RecordStatus::kFailed;
  r.reason = reason;
  r.original_text = c.original.text();
  r.perturbed_text = c.perturbed.text();
  return r;
}

PredictionSummary Summary(const ModelClient& model, const Prediction& p) {
  return {model.handle().label_set.name(p.predicted_index()), p.confidence()};
}

Top1Summary Top1(const Explanation& e) {
  return {e.top1_index(), e.top1_token(), e.top1_score()};
}

void WriteFileIfChanged(const fs::path& path, const std::string& content) {
  std::ifstream in(path, std::ios::binary);
  if (in) {
    std::string existing((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
    if (existing == content) return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

PreparedRun PrepareRun(const RunConfig& config) {
  config.Validate();
  PreparedRun prepared;
  IngestResult ingest = IngestDataset(config.dataset.path, config.dataset.format,
                                      config.dataset.delimiter);
  prepared.dropped_documents = ingest.dropped;
  prepared.admitted_documents = ingest.documents.size();
  prepared.documents =
      SampleDocuments(ingest.documents, config.sample_size, config.global_seed);
  const SynonymLexicon lexicon = LoadLexiconFor(config);
  auto translator = MakeTranslator(config.translator, config.retry);
  prepared.grid = BuildPerturbationGrid(prepared.documents, config.cells, lexicon,
                                        *translator, config.global_seed);
  return prepared;
}

json PairedCaseToJson(const PairedCase& c) {
  return {{"case_id", c.case_id()},
          {"document_id", c.original.id()},
          {"op_type", std::string(OpTypeName(c.config.op))},
          {"severity", c.config.severity.fraction()},
          {"seed", c.config.seed},
          {"status", "ok"},
          {"original_text", c.original.NormalizedText()},
          {"perturbed_text", c.perturbed.NormalizedText()},
          {"budget", c.budget},
          {"applied", c.applied},
          {"replicate", c.replicate}};
}

json SkippedCaseToJson(const SkippedCase& c) {
  return {{"case_id", c.case_id},
          {"document_id", c.document_id},
          {"op_type", std::string(OpTypeName(c.op))},
          {"severity", c.severity.fraction()},
          {"status", "skipped:" + c.reason},
          {"original_text", c.original_text}};
}

RunRecord EvaluateCase(ModelClient& model, const PairedCase& paired,
                       const ExplanationRequest& request,
                       std::uint64_t global_seed) {
  // The original side is seeded per document so its explanation is the same
  // in every cell.
  const std::uint64_t original_seed =
      HashCombine(HashCombine(global_seed, HashString(paired.original.id())), 1);
  const std::uint64_t perturbed_seed =
      HashCombine(HashCombine(global_seed, HashString(paired.case_id())), 2);
  ExplainResult original = Explain(model, paired.original, request, original_seed);
  ExplainResult perturbed = Explain(model, paired.perturbed, request, perturbed_seed);

  RunRecord r = BaseRecord(model.name(), paired.case_id(), paired.config.op,
                           paired.config.severity);
  r.original_text = paired.original.NormalizedText();
  r.perturbed_text = paired.perturbed.NormalizedText();
  r.original_pred = Summary(model, original.prediction);
  r.perturbed_pred = Summary(model, perturbed.prediction);
  r.original_top1 = Top1(original.explanation);
  r.perturbed_top1 = Top1(perturbed.explanation);
  r.original_topk_tokens = original.explanation.TopKRanked(kStoredTopK);
  r.perturbed_topk_tokens = perturbed.explanation.TopKRanked(kStoredTopK);
  r.query_count = original.predict_calls + perturbed.predict_calls;
  return r;
}

RunSummary ExecuteRun(const RunConfig& config, const RunOptions& options) {
  const PreparedRun prepared = PrepareRun(config);
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);

  const json config_json = ConfigToJson(config);
  const fs::path config_path = dir / kConfigFile;
  if (fs::exists(config_path)) {
    std::ifstream in(config_path, std::ios::binary);
    json existing;
    try {
      existing = json::parse(in);
    } catch (const json::parse_error&) {
      throw ConfigError("unreadable " + config_path.string());
    }
    if (ResultConfigJson(existing) != ResultConfigJson(config_json)) {
      throw ConfigError("run directory " + dir.string() +
                        " holds a run with a different configuration");
    }
  }
  WriteFileIfChanged(config_path, config_json.dump(2) + "\n");

  std::string cases_text;
  for (const auto& c : prepared.grid.cases) cases_text += PairedCaseToJson(c).dump() + "\n";
  for (const auto& s : prepared.grid.skipped) cases_text += SkippedCaseToJson(s).dump() + "\n";
  WriteFileIfChanged(dir / kCasesFile, cases_text);

  const std::string records_path = (dir / kRecordsFile).string();
  std::size_t valid_bytes = 0;
  const std::vector<RunRecord> existing = ReadRecords(records_path, &valid_bytes);
  std::set<std::pair<std::string, std::string>> done;
  for (const auto& r : existing) {
    if (r.status != RecordStatus::kFailed) done.insert({r.model, r.case_id});
  }
  RecordWriter writer(records_path, valid_bytes);

  RunSummary summary;
  summary.run_dir = dir.string();
  summary.expected = (prepared.grid.cases.size() + prepared.grid.skipped.size()) *
                     config.models.size();

  std::atomic<std::size_t> written{0};
  std::atomic<bool> stop{false};
  // Returns false once the simulated crash point is reached.
  auto persist = [&](const RunRecord& r) {
    if (options.stop_after_records) {
      const std::size_t slot = written.fetch_add(1);
      if (slot >= *options.stop_after_records) {
        written.fetch_sub(1);
        stop = true;
        return false;
      }
      writer.Append(r);
      return true;
    }
    writer.Append(r);
    ++written;
    return true;
  };

  std::atomic<std::size_t> evaluated{0};
  for (const ModelHandle& handle : config.models) {
    if (stop) break;
    for (const auto& s : prepared.grid.skipped) {
      if (done.count({handle.name, s.case_id})) continue;
      RunRecord r = BaseRecord(handle.name, s.case_id, s.op, s.severity);
      r.status = RecordStatus::kSkipped;
      r.reason = s.reason;
      r.original_text = s.original_text;
      if (!persist(r)) break;
    }
    if (stop) break;

    std::vector<const PairedCase*> pending;
    for (const auto& c : prepared.grid.cases) {
      if (!done.count({handle.name, c.case_id()})) pending.push_back(&c);
    }
    if (pending.empty()) continue;

    auto client = MakeModelClient(handle, std::make_shared<QueryCache>(), config.retry);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> aborted{false};
    std::mutex abort_mu;
    std::string abort_reason;

    auto worker = [&]() {
      for (;;) {
        if (stop) return;
        const std::size_t i = next.fetch_add(1);
        if (i >= pending.size()) return;
        const PairedCase& c = *pending[i];
        RunRecord record;
        if (aborted) {
          std::lock_guard lock(abort_mu);
          record = FailedRecord(handle.name, c, "model aborted: " + abort_reason);
        } else {
          try {
            ++evaluated;
            record = EvaluateCase(*client, c, config.explainer, config.global_seed);
          } catch (const TransportError& e) {
            {
              std::lock_guard lock(abort_mu);
              if (!aborted) abort_reason = e.what();
              aborted = true;
            }
            record = FailedRecord(handle.name, c, std::string("transport: ") + e.what());
          } catch (const std::exception& e) {
            record = FailedRecord(handle.name, c,
                                  std::string("explanation failed: ") + e.what());
          }
        }
        if (!persist(record)) return;
      }
    };

    const unsigned workers = std::max(
        1U, std::min<unsigned>(config.concurrency, static_cast<unsigned>(pending.size())));
    {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    }
    if (aborted) {
      summary.aborted_models.push_back(handle.name);
      std::cerr << "model " << handle.name << " aborted: " << abort_reason << "\n";
    }
  }

  summary.written = written;
  summary.evaluated = evaluated;
  summary.interrupted = stop;
  for (const auto& r : CanonicalRecords(ReadRecords(records_path))) {
    switch (r.status) {
      case RecordStatus::kOk:
        ++summary.ok;
        break;
      case RecordStatus::kSkipped:
        ++summary.skipped;
        break;
      case RecordStatus::kFailed:
        ++summary.failed;
        break;
    }
  }
  if (!summary.interrupted && !options.skip_report && summary.ok > 0) {
    EmitReport(summary.run_dir);
  }
  return summary;
}

}  // namespace xstab
