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

#include "xstab/dataset.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <unordered_set>

#include "json.hpp"
#include "xstab/errors.h"
#include "xstab/rng.h"

namespace xstab {
namespace {

std::string PaddedIndex(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06zu", index);
  return buf;
}

std::string Where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

std::string ScalarToString(const nlohmann::json& value) {
  return value.is_string() ? value.get<std::string>() : value.dump();
}

void Admit(IngestResult& result, std::unordered_set<std::string>& ids,
           Document doc, const std::string& source, std::size_t line) {
  if (doc.words().empty()) {
    ++result.dropped;
    return;
  }
  if (!ids.insert(doc.id()).second) {
    throw DatasetError(Where(source, line) + "duplicate id " + doc.id());
  }
  result.documents.push_back(std::move(doc));
}

// One RFC 4180 record; false at end of input. `line` advances by the number
// of physical lines consumed.
bool ReadCsvRecord(std::istream& in, char delimiter, std::vector<std::string>& fields,
                   std::size_t& line, const std::string& source) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  ++line;
  std::string field;
  bool quoted = false;
  bool field_started_quoted = false;
  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && field.empty() && !field_started_quoted) {
      quoted = true;
      field_started_quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
      field_started_quoted = false;
    } else if (c == '\n') {
      break;
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get(c);
      break;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw DatasetError(Where(source, line) + "unterminated quoted field");
  fields.push_back(std::move(field));
  return true;
}

}  // namespace

std::string_view DatasetFormatName(DatasetFormat format) {
  return format == DatasetFormat::kJsonl ? "jsonl" : "csv";
}

DatasetFormat ParseDatasetFormat(std::string_view name) {
  if (name == "jsonl") return DatasetFormat::kJsonl;
  if (name == "csv" || name == "tsv") return DatasetFormat::kCsv;
  throw ConfigError("unknown dataset format: " + std::string(name));
}

IngestResult ParseJsonl(std::istream& in, const std::string& source_name) {
  IngestResult result;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t index = 0;
  for (; std::getline(in, line); ++index) {
    const std::size_t line_no = index + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DatasetError(Where(source_name, line_no) + "invalid JSON: " + e.what());
    }
    if (!row.is_object() || !row.contains("text") || !row["text"].is_string()) {
      throw DatasetError(Where(source_name, line_no) + "missing string field \"text\"");
    }
    std::string id = row.contains("id") && !row["id"].is_null()
                         ? ScalarToString(row["id"])
                         : PaddedIndex(index);
    std::optional<std::string> label;
    if (row.contains("label") && !row["label"].is_null()) {
      label = ScalarToString(row["label"]);
    }
    Admit(result, ids, Document(std::move(id), row["text"].get<std::string>(), label),
          source_name, line_no);
  }
  return result;
}

IngestResult ParseCsv(std::istream& in, const std::string& source_name,
                      char delimiter) {
  IngestResult result;
  std::unordered_set<std::string> ids;
  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!ReadCsvRecord(in, delimiter, fields, line, source_name)) return result;
  std::size_t row = 0;
  while (true) {
    const std::size_t start_line = line + 1;
    if (!ReadCsvRecord(in, delimiter, fields, line, source_name)) break;
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != 2) {
      throw DatasetError(Where(source_name, start_line) + "expected 2 columns, got " +
                         std::to_string(fields.size()));
    }
    std::optional<std::string> label;
    if (!fields[1].empty()) label = fields[1];
    Admit(result, ids, Document(PaddedIndex(row), fields[0], label), source_name,
          start_line);
    ++row;
  }
  return result;
}

IngestResult IngestDataset(const std::string& path, DatasetFormat format,
                           char delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open dataset " + path);
  return format == DatasetFormat::kJsonl ? ParseJsonl(in, path)
                                         : ParseCsv(in, path, delimiter);
}

std::vector<Document> SampleDocuments(std::span<const Document> documents,
                                      std::size_t sample_size,
                                      std::uint64_t global_seed) {
  if (sample_size > documents.size()) {
    throw ConfigError("sample_size " + std::to_string(sample_size) +
                      " exceeds the " + std::to_string(documents.size()) +
                      " admitted documents");
  }
  Rng rng(HashCombine(global_seed, HashString("sample_documents")));
  std::vector<std::size_t> picked =
      rng.SampleWithoutReplacement(documents.size(), sample_size);
  std::sort(picked.begin(), picked.end());
  std::vector<Document> out;
  out.reserve(picked.size());
  for (std::size_t i : picked) out.push_back(documents[i]);
  return out;
}

}  // namespace xstab
