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

#include "xstab/records.h"

#include <algorithm>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <utility>

#include "xstab/errors.h"

namespace xstab {
namespace {

using nlohmann::json;

json PredToJson(const std::optional<PredictionSummary>& p) {
  if (!p) return nullptr;
  return {{"label", p->label}, {"confidence", p->confidence}};
}

json Top1ToJson(const std::optional<Top1Summary>& t) {
  if (!t) return nullptr;
  return {{"index", t->index}, {"token", t->token}, {"score", t->score}};
}

std::optional<PredictionSummary> PredFromJson(const json& j) {
  if (j.is_null()) return std::nullopt;
  return PredictionSummary{j.at("label").get<std::string>(),
                           j.at("confidence").get<double>()};
}

std::optional<Top1Summary> Top1FromJson(const json& j) {
  if (j.is_null()) return std::nullopt;
  return Top1Summary{j.at("index").get<std::size_t>(),
                     j.at("token").get<std::string>(), j.at("score").get<double>()};
}

}  // namespace

std::string RunRecord::document_id() const {
  const auto bar = case_id.rfind('|');
  return bar == std::string::npos ? case_id : case_id.substr(0, bar);
}

std::string StatusString(const RunRecord& record) {
  switch (record.status) {
    case RecordStatus::kOk:
      return "ok";
    case RecordStatus::kSkipped:
      return "skipped:" + record.reason;
    case RecordStatus::kFailed:
      return "failed:" + record.reason;
  }
  return "unknown";
}

json RecordToJson(const RunRecord& r) {
  json j;
  j["model"] = r.model;
  j["case_id"] = r.case_id;
  j["op_type"] = std::string(OpTypeName(r.op));
  j["severity"] = r.severity.fraction();
  j["status"] = StatusString(r);
  j["original_text"] = r.original_text;
  j["perturbed_text"] = r.perturbed_text;
  j["original_pred"] = PredToJson(r.original_pred);
  j["perturbed_pred"] = PredToJson(r.perturbed_pred);
  j["original_top1"] = Top1ToJson(r.original_top1);
  j["perturbed_top1"] = Top1ToJson(r.perturbed_top1);
  j["original_topk_tokens"] = r.original_topk_tokens;
  j["perturbed_topk_tokens"] = r.perturbed_topk_tokens;
  j["query_count"] = r.query_count;
  return j;
}

RunRecord RecordFromJson(const json& j) {
  try {
    RunRecord r;
    r.model = j.at("model").get<std::string>();
    r.case_id = j.at("case_id").get<std::string>();
    r.op = ParseOpType(j.at("op_type").get<std::string>());
    r.severity = Severity::FromFraction(j.at("severity").get<double>());
    const std::string status = j.at("status").get<std::string>();
    if (status == "ok") {
      r.status = RecordStatus::kOk;
    } else if (status.rfind("skipped:", 0) == 0) {
      r.status = RecordStatus::kSkipped;
      r.reason = status.substr(8);
    } else if (status.rfind("failed:", 0) == 0) {
      r.status = RecordStatus::kFailed;
      r.reason = status.substr(7);
    } else {
      throw std::invalid_argument("unknown status " + status);
    }
    r.original_text = j.at("original_text").get<std::string>();
    r.perturbed_text = j.at("perturbed_text").get<std::string>();
    r.original_pred = PredFromJson(j.at("original_pred"));
    r.perturbed_pred = PredFromJson(j.at("perturbed_pred"));
    r.original_top1 = Top1FromJson(j.at("original_top1"));
    r.perturbed_top1 = Top1FromJson(j.at("perturbed_top1"));
    r.original_topk_tokens = j.at("original_topk_tokens").get<std::vector<std::string>>();
    r.perturbed_topk_tokens = j.at("perturbed_topk_tokens").get<std::vector<std::string>>();
    r.query_count = j.at("query_count").get<std::size_t>();
    if (r.ok() && (!r.original_pred || !r.perturbed_pred || !r.original_top1 ||
                   !r.perturbed_top1)) {
      throw std::invalid_argument("ok record without predictions or explanations");
    }
    return r;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed record: ") + e.what());
  } catch (const ConfigError& e) {
    throw std::invalid_argument(std::string("malformed record: ") + e.what());
  }
}

std::string SerializeRecord(const RunRecord& record) {
  return RecordToJson(record).dump();
}

std::vector<RunRecord> ReadRecords(const std::string& path,
                                   std::size_t* valid_bytes) {
  std::vector<RunRecord> records;
  std::ifstream in(path, std::ios::binary);
  std::size_t good = 0;
  if (in) {
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < content.size()) {
      const auto nl = content.find('\n', pos);
      if (nl == std::string::npos) break;  // torn final write
      ++line_no;
      const std::string_view line(content.data() + pos, nl - pos);
      if (!line.empty()) {
        try {
          records.push_back(RecordFromJson(json::parse(line)));
        } catch (const std::exception& e) {
          throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                      ": " + e.what());
        }
      }
      pos = nl + 1;
      good = pos;
    }
  }
  if (valid_bytes) *valid_bytes = good;
  return records;
}

std::vector<RunRecord> CanonicalRecords(std::vector<RunRecord> records) {
  std::map<std::pair<std::string, std::string>, RunRecord> latest;
  for (auto& r : records) {
    auto key = std::make_pair(r.model, r.case_id);
    latest.insert_or_assign(std::move(key), std::move(r));
  }
  std::vector<RunRecord> out;
  out.reserve(latest.size());
  for (auto& [key, r] : latest) out.push_back(std::move(r));
  return out;
}

RecordWriter::RecordWriter(const std::string& path, std::size_t keep_bytes) {
  if (std::filesystem::exists(path)) {
    std::filesystem::resize_file(path, keep_bytes);
  }
  out_.open(path, std::ios::binary | std::ios::app);
  if (!out_) throw std::runtime_error("cannot open " + path + " for append");
}

void RecordWriter::Append(const RunRecord& record) {
  const std::string line = SerializeRecord(record) + "\n";
  std::lock_guard lock(mu_);
  out_ << line;
  out_.flush();
  if (!out_) throw std::runtime_error("failed writing run record");
}

}  // namespace xstab
