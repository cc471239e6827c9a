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

#include "xstab/translate.h"

#include "xstab/core.h"
#include "xstab/http_backends.h"

namespace xstab {

std::string DictionaryTranslator::Translate(const std::string& text,
                                            std::string_view source,
                                            std::string_view target) {
  const Table* table = nullptr;
  if (source == "en" && target == "de") {
    table = &en_to_de_;
  } else if (source == "de" && target == "en") {
    table = &de_to_en_;
  } else {
    throw TranslationError("unsupported language pair " + std::string(source) +
                           "->" + std::string(target));
  }
  std::vector<std::string> words = Tokenize(text);
  for (auto& word : words) {
    auto it = table->find(ToLowerAscii(word));
    if (it != table->end()) word = it->second;
  }
  return Detokenize(words);
}

HttpTranslator::HttpTranslator(std::string base_url, RetryPolicy policy,
                               std::string bearer_token_env)
    : base_url_(std::move(base_url)),
      policy_(policy),
      token_(BearerTokenFromEnv(bearer_token_env)) {}

std::string HttpTranslator::Translate(const std::string& text,
                                      std::string_view source,
                                      std::string_view target) {
  const nlohmann::json request = {
      {"text", text}, {"source", source}, {"target", target}};
  nlohmann::json response;
  try {
    response = PostJson(base_url_, "/translate", request, policy_, token_);
  } catch (const Error& e) {
    throw TranslationError(e.what());
  }
  if (!response.is_object() || !response.contains("text") ||
      !response["text"].is_string()) {
    throw TranslationError("translate response lacks a \"text\" string");
  }
  return response["text"].get<std::string>();
}

std::string BackTranslate(const std::string& text, Translator& translator) {
  const std::string german = translator.Translate(text, "en", "de");
  if (Tokenize(german).empty()) {
    throw TranslationError("en->de translation came back empty");
  }
  std::string english = translator.Translate(german, "de", "en");
  if (Tokenize(english).empty()) {
    throw TranslationError("de->en translation came back empty");
  }
  return english;
}

}  // namespace xstab
