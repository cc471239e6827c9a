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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "xstab/cost.h"
#include "xstab/errors.h"
#include "xstab/metrics.h"
#include "xstab/runner.h"

namespace xstab {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json CiToJson(const std::optional<ConfidenceInterval>& ci) {
  if (!ci) return nullptr;
  return json::array({ci->lower, ci->upper});
}

json MetricReportToJson(const MetricReport& m) {
  json key = json::object();
  key["model"] = m.key.model ? json(*m.key.model) : json(nullptr);
  key["dataset"] = m.key.dataset ? json(*m.key.dataset) : json(nullptr);
  key["op_type"] = m.key.op ? json(std::string(OpTypeName(*m.key.op))) : json(nullptr);
  key["severity"] = m.key.severity ? json(m.key.severity->fraction()) : json(nullptr);
  json j;
  j["key"] = key;
  j["N"] = m.n;
  j["flip_rate"] = m.flip_rate;
  j["flip_rate_ci"] = CiToJson(m.flip_rate_ci);
  j["top5_overlap"] = m.top5_overlap;
  j["prediction_consistency"] = m.prediction_consistency;
  j["pred_consistent_flip_rate"] =
      m.pred_consistent_flip_rate ? json(*m.pred_consistent_flip_rate) : json(nullptr);
  j["pred_consistent_flip_rate_ci"] = CiToJson(m.pred_consistent_flip_rate_ci);
  j["pred_consistent_N"] = m.pred_consistent_n;
  return j;
}

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string CiLower(const MetricReport& m) {
  return m.flip_rate_ci ? Num(m.flip_rate_ci->lower) : "";
}

std::string CiUpper(const MetricReport& m) {
  return m.flip_rate_ci ? Num(m.flip_rate_ci->upper) : "";
}

struct ModelSummary {
  const ModelHandle* handle = nullptr;
  std::optional<MetricReport> overall;
  std::vector<MetricReport> by_op;
  std::vector<MetricReport> by_cell;
  std::optional<CostProfile> cost;
  std::optional<TierAssignment> tier;
};

std::vector<ModelSummary> SummarizeModels(const RunConfig& config,
                                    const std::vector<RunRecord>& records,
                                          json& groups, json& undefined_groups) {
  const BootstrapOptions bootstrap = config.bootstrap();
  std::vector<OpType> ops;
  std::vector<Severity> severities;
  for (const auto& cell : config.cells) {
    if (std::find(ops.begin(), ops.end(), cell.op) == ops.end()) ops.push_back(cell.op);
    if (std::find(severities.begin(), severities.end(), cell.severity) ==
        severities.end()) {
      severities.push_back(cell.severity);
    }
  }

  std::vector<ModelSummary> out;
  for (const auto& handle : config.models) {
    ModelSummary summary;
    summary.handle = &handle;
    std::vector<RunRecord> mine;
    for (const auto& r : records) {
      if (r.model == handle.name) mine.push_back(r);
    }

    auto report = [&](GroupKey key, auto&& keep) -> std::optional<MetricReport> {
      std::vector<RunRecord> subset;
      for (const auto& r : mine) {
        if (keep(r)) subset.push_back(r);
      }
      try {
        MetricReport m = ComputeMetricReport(key, subset, bootstrap);
        groups.push_back(MetricReportToJson(m));
        return m;
      } catch (const UndefinedMetricError& e) {
        undefined_groups.push_back({{"group", key.ToString()}, {"reason", e.what()}});
        return std::nullopt;
      }
    };
    auto key_for = [&](std::optional<OpType> op, std::optional<Severity> sev) {
      return GroupKey{handle.name, config.dataset.name, op, sev};
    };

    for (const auto& cell : config.cells) {
      auto m = report(key_for(cell.op, cell.severity), [&](const RunRecord& r) {
        return r.op == cell.op && r.severity == cell.severity;
      });
      if (m) summary.by_cell.push_back(*m);
    }
    for (OpType op : ops) {
      auto m = report(key_for(op, std::nullopt),
                      [&](const RunRecord& r) { return r.op == op; });
      if (m) summary.by_op.push_back(*m);
    }
    for (Severity sev : severities) {
      report(key_for(std::nullopt, sev),
             [&](const RunRecord& r) { return r.severity == sev; });
    }
    summary.overall = report(key_for(std::nullopt, std::nullopt),
                             [](const RunRecord&) { return true; });

    if (summary.overall) {
      std::map<std::string, std::size_t> words_by_doc;
      for (const auto& r : mine) {
        if (r.ok()) words_by_doc[r.document_id()] = Tokenize(r.original_text).size();
      }
      double total = 0.0;
      for (const auto& [doc, n] : words_by_doc) total += static_cast<double>(n);
      summary.cost = MakeCostProfile(handle.name,
                                     total / static_cast<double>(words_by_doc.size()),
                                     handle.per_call_cost);
      summary.tier = AssignTier(summary.overall->flip_rate, config.tiers);
    }
    out.push_back(std::move(summary));
  }
  return out;
}

void WriteText(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

json BuildReportImpl(const RunConfig& config, const std::vector<RunRecord>& records,
                     const std::vector<json>& cases,
                     std::vector<ModelSummary>* summaries_out) {
  json report;
  report["config"] = ResultConfigJson(ConfigToJson(config));

  json meta;
  meta["bootstrap"] = {{"method", "paired percentile, nearest-rank"},
                       {"iterations", config.bootstrap_iterations},
                       {"level", config.bootstrap_level},
                       {"seed", config.bootstrap().seed}};
  meta["flip_comparison"] =
      "lowercased top-1 token strings; raw top-1 indices are kept in records";
  meta["top1_tie_break"] = "leftmost word index";
  meta["tokenization"] = "maximal non-whitespace runs";
  meta["stopwords"] = {{"version", std::string(StopwordListVersion())},
                       {"entries", StopwordCount()}};
  meta["character_budget"] = "floor(s * C), C = non-whitespace code points";
  meta["shuffle_window"] = kShuffleWindow;
  meta["back_translate"] =
      "severity is nominal; the three back_translate cells are replicates of one "
      "round-trip translation";
  json explainer = {{"method", std::string(ExplainMethodName(config.explainer.method))}};
  if (config.explainer.surrogate) {
    const auto& sp = *config.explainer.surrogate;
    explainer["num_samples"] = sp.num_samples;
    explainer["kernel_width"] =
        std::isinf(sp.kernel_width) ? json("uniform") : json(sp.kernel_width);
    explainer["mask_probability"] = sp.mask_probability;
    explainer["exhaustive"] = sp.exhaustive;
  }
  meta["explainer"] = explainer;
  meta["empty_occlusion_marker"] = std::string(kEmptyMarker);
  report["metadata"] = meta;

  std::size_t ok = 0, skipped = 0, failed = 0;
  json exceptions = json::array();
  for (const auto& r : records) {
    if (r.ok()) {
      ++ok;
      continue;
    }
    (r.status == RecordStatus::kSkipped ? skipped : failed)++;
    exceptions.push_back({{"model", r.model}, {"case_id", r.case_id},
                          {"status", StatusString(r)}});
  }
  if (ok == 0) throw UndefinedMetricError("run has no ok records");
  report["counts"] = {{"expected", cases.size() * config.models.size()},
                      {"records", records.size()},
                      {"ok", ok},
                      {"skipped", skipped},
                      {"failed", failed}};
  report["exceptions"] = exceptions;

  json clamped = json::array();
  for (const auto& c : cases) {
    if (c.value("status", "") != "ok" || c.value("replicate", false)) continue;
    if (c.value("applied", 0) < c.value("budget", 0)) {
      clamped.push_back({{"case_id", c["case_id"]},
                         {"budget", c["budget"]},
                         {"applied", c["applied"]}});
    }
  }
  report["budget_shortfalls"] = clamped;

  json groups = json::array();
  json undefined_groups = json::array();
  const auto summaries = SummarizeModels(config, records, groups, undefined_groups);
  report["groups"] = groups;
  report["undefined_groups"] = undefined_groups;

  json costs = json::array();
  json tiers = json::array();
  for (const auto& s : summaries) {
    if (!s.cost) continue;
    costs.push_back({{"model", s.cost->model},
                     {"mean_word_count", s.cost->mean_word_count},
                     {"per_call_cost", s.cost->per_call_cost},
                     {"cost_multiplier", s.cost->cost_multiplier}});
    tiers.push_back({{"model", s.handle->name},
                     {"tier", std::string(TierName(s.tier->tier))},
                     {"basis_flip_rate", s.tier->basis},
                     {"thresholds",
                      {{"regulatory_below", s.tier->thresholds.regulatory_below},
                       {"balanced_below", s.tier->thresholds.balanced_below}}}});
  }
  report["cost_profiles"] = costs;
  report["tiers"] = tiers;
  if (summaries_out != nullptr) *summaries_out = summaries;
  return report;
}

}  // namespace

json BuildReport(const RunConfig& config, const std::vector<RunRecord>& records,
                 const std::vector<json>& cases) {
  return BuildReportImpl(config, records, cases, nullptr);
}

void EmitReport(const std::string& run_dir) {
  const fs::path dir(run_dir);
  std::ifstream config_in(dir / kConfigFile);
  if (!config_in) throw ConfigError("no " + std::string(kConfigFile) + " in " + run_dir);
  const RunConfig config = ParseRunConfig(json::parse(config_in), "/");

  const std::vector<RunRecord> records =
      CanonicalRecords(ReadRecords((dir / kRecordsFile).string()));
  std::vector<json> cases;
  {
    std::ifstream in(dir / kCasesFile);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) cases.push_back(json::parse(line));
    }
  }
  std::vector<ModelSummary> summaries;
  const json report = BuildReportImpl(config, records, cases, &summaries);
  WriteText(dir / kReportFile, report.dump(2) + "\n");

  // Flat tables for plotting, one per figure.
  const fs::path plot_dir = dir / kPlotDataDir;
  fs::create_directories(plot_dir);

  std::ostringstream by_model, by_scale, by_op, by_cell, cost_vs_fr;
  by_model << "model,dataset,n,flip_rate,ci_lower,ci_upper,pred_consistent_flip_rate,"
              "top5_overlap,prediction_consistency\n";
  by_scale << "model,scale,per_call_cost,flip_rate,ci_lower,ci_upper\n";
  by_op << "model,dataset,op_type,n,flip_rate,ci_lower,ci_upper\n";
  by_cell << "model,dataset,op_type,severity,n,flip_rate,ci_lower,ci_upper\n";
  cost_vs_fr << "model,mean_word_count,per_call_cost,cost_multiplier,flip_rate,tier\n";
  for (const auto& s : summaries) {
    if (!s.overall) continue;
    const auto& o = *s.overall;
    const std::string& name = s.handle->name;
    by_model << name << "," << config.dataset.name << "," << o.n << ","
             << Num(o.flip_rate) << "," << CiLower(o) << "," << CiUpper(o) << ","
             << (o.pred_consistent_flip_rate ? Num(*o.pred_consistent_flip_rate) : "")
             << "," << Num(o.top5_overlap) << "," << Num(o.prediction_consistency)
             << "\n";
    by_scale << name << "," << (s.handle->scale ? Num(*s.handle->scale) : "") << ","
             << Num(s.handle->per_call_cost) << "," << Num(o.flip_rate) << ","
             << CiLower(o) << "," << CiUpper(o) << "\n";
    for (const auto& m : s.by_op) {
      by_op << name << "," << config.dataset.name << "," << OpTypeName(*m.key.op)
            << "," << m.n << "," << Num(m.flip_rate) << "," << CiLower(m) << ","
            << CiUpper(m) << "\n";
    }
    for (const auto& m : s.by_cell) {
      by_cell << name << "," << config.dataset.name << "," << OpTypeName(*m.key.op)
              << "," << m.key.severity->Label() << "," << m.n << ","
              << Num(m.flip_rate) << "," << CiLower(m) << "," << CiUpper(m) << "\n";
    }
    cost_vs_fr << name << "," << Num(s.cost->mean_word_count) << ","
               << Num(s.cost->per_call_cost) << "," << Num(s.cost->cost_multiplier)
               << "," << Num(o.flip_rate) << "," << TierName(s.tier->tier) << "\n";
  }
  WriteText(plot_dir / "fr_by_model_dataset.csv", by_model.str());
  WriteText(plot_dir / "fr_by_scale.csv", by_scale.str());
  WriteText(plot_dir / "fr_by_op_type.csv", by_op.str());
  WriteText(plot_dir / "fr_by_cell.csv", by_cell.str());
  WriteText(plot_dir / "cost_vs_fr.csv", cost_vs_fr.str());
}

}  // namespace xstab
