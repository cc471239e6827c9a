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

#ifndef XSTAB_TRANSLATE_H_
#define XSTAB_TRANSLATE_H_

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "xstab/errors.h"
#include "xstab/modelclient.h"

namespace xstab {

// Raised when a round-trip translation cannot be produced. The grid records
// the case as skipped; it never falls back to the untranslated text.
class TranslationError : public Error {
 public:
  using Error::Error;
};

class Translator {
 public:
  virtual ~Translator() = default;
  virtual std::string Translate(const std::string& text, std::string_view source,
                                std::string_view target) = 0;
};

class IdentityTranslator : public Translator {
 public:
  std::string Translate(const std::string& text, std::string_view,
                        std::string_view) override {
    return text;
  }
};

// Word-by-word test double. Tokens are looked up lowercased; unknown tokens
// pass through unchanged.
class DictionaryTranslator : public Translator {
 public:
  using Table = std::map<std::string, std::string, std::less<>>;
  DictionaryTranslator(Table en_to_de, Table de_to_en)
      : en_to_de_(std::move(en_to_de)), de_to_en_(std::move(de_to_en)) {}

  std::string Translate(const std::string& text, std::string_view source,
                        std::string_view target) override;

 private:
  Table en_to_de_;
  Table de_to_en_;
};

// POST /translate {"text", "source", "target"} -> {"text"}.
class HttpTranslator : public Translator {
 public:
  HttpTranslator(std::string base_url, RetryPolicy policy,
                 std::string bearer_token_env = {});
  std::string Translate(const std::string& text, std::string_view source,
                        std::string_view target) override;

 private:
  std::string base_url_;
  RetryPolicy policy_;
  std::string token_;
};

// en -> de -> en. Throws TranslationError if either leg fails or the result
// is empty after whitespace normalization.
std::string BackTranslate(const std::string& text, Translator& translator);

}  // namespace xstab

#endif  // XSTAB_TRANSLATE_H_
