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

#ifndef XSTAB_DATASET_H_
#define XSTAB_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xstab/core.h"

namespace xstab {

enum class DatasetFormat { kJsonl, kCsv };

std::string_view DatasetFormatName(DatasetFormat format);
DatasetFormat ParseDatasetFormat(std::string_view name);

struct IngestResult {
  std::vector<Document> documents;
  // Rows whose text tokenized to nothing.
  std::size_t dropped = 0;
};

// JSON lines: {"id"?: string, "text": string, "label"?: string}; a missing id
// becomes the zero-padded 0-based line index. CSV: header row, then
// (text, label) rows with RFC 4180 quoting; ids are zero-padded 0-based row
// indices. Throws DatasetError naming the 1-based line of a bad row, or a
// duplicated id.
IngestResult IngestDataset(const std::string& path, DatasetFormat format,
                           char delimiter = ',');
IngestResult ParseJsonl(std::istream& in, const std::string& source_name);
IngestResult ParseCsv(std::istream& in, const std::string& source_name,
                      char delimiter = ',');

// Uniform sample without replacement, returned in input order. Throws
// ConfigError if sample_size exceeds the document count.
std::vector<Document> SampleDocuments(std::span<const Document> documents,
                                      std::size_t sample_size,
                                      std::uint64_t global_seed);

}  // namespace xstab

#endif  // XSTAB_DATASET_H_
