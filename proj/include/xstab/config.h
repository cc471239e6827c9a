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

#ifndef XSTAB_CONFIG_H_
#define XSTAB_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "xstab/cost.h"
#include "xstab/dataset.h"
#include "xstab/explain.h"
#include "xstab/metrics.h"
#include "xstab/modelclient.h"
#include "xstab/perturb.h"
#include "xstab/translate.h"

namespace xstab {

struct DatasetConfig {
  std::string path;
  DatasetFormat format = DatasetFormat::kJsonl;
  char delimiter = ',';
  // Reported as the dataset component of every group key.
  std::string name;
};

struct TranslatorConfig {
  // "identity", "dictionary" or "http".
  std::string kind = "identity";
  std::string base_url;
  std::string bearer_token_env;
  DictionaryTranslator::Table en_de;
  DictionaryTranslator::Table de_en;
};

// Everything that determines a run. Relative paths are resolved against the
// directory of the config file.
struct RunConfig {
  std::uint64_t global_seed = 0;
  DatasetConfig dataset;
  std::size_t sample_size = 200;
  std::vector<ModelHandle> models;
  std::vector<GridCell> cells = FullGrid();
  ExplanationRequest explainer;
  std::size_t bootstrap_iterations = 10000;
  double bootstrap_level = 0.95;
  std::string lexicon_path;
  TranslatorConfig translator;
  std::string output_dir;
  // Cases evaluated concurrently per model, i.e. max in-flight queries.
  unsigned concurrency = 4;
  TierThresholds tiers;
  RetryPolicy retry;

  // Throws ConfigError.
  void Validate() const;
  BootstrapOptions bootstrap() const;
};

// Throws ConfigError on missing or ill-typed fields.
RunConfig ParseRunConfig(const nlohmann::json& j,
                         const std::filesystem::path& base_dir);
RunConfig LoadRunConfig(const std::string& path);

// Canonical echo with resolved paths and inlined toy lexicons;
// ParseRunConfig(ConfigToJson(c), "/") reproduces c.
nlohmann::json ConfigToJson(const RunConfig& config);

// ConfigToJson minus the settings that cannot change results: output_dir,
// concurrency and retry.
nlohmann::json ResultConfigJson(const nlohmann::json& config_json);

std::unique_ptr<Translator> MakeTranslator(const TranslatorConfig& config,
                                           const RetryPolicy& retry);
SynonymLexicon LoadLexiconFor(const RunConfig& config);

}  // namespace xstab

#endif  // XSTAB_CONFIG_H_
