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

#ifndef XSTAB_CORE_H_
#define XSTAB_CORE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xstab {

// Splits on runs of ASCII whitespace. Punctuation stays attached to its word.
std::vector<std::string> Tokenize(std::string_view text);

// Joins with single spaces.
std::string Detokenize(std::span<const std::string> words);

std::string ToLowerAscii(std::string_view s);

// Lowercased token with non-alphanumeric characters trimmed from both ends.
// Bytes >= 0x80 (UTF-8 continuation/lead bytes) count as alphanumeric.
std::string NormalizeToken(std::string_view token);

// True iff NormalizeToken(token) is non-empty and not a stopword.
bool IsContentWord(std::string_view token);

bool IsStopword(std::string_view normalized_token);

// Identifier of the bundled stopword list, echoed into reports.
std::string_view StopwordListVersion();
std::size_t StopwordCount();

// Ordered, duplicate-free list of label names.
class LabelSet {
 public:
  explicit LabelSet(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::string& name(std::size_t index) const { return labels_.at(index); }
  const std::vector<std::string>& names() const { return labels_; }
  // Throws std::out_of_range for unknown labels.
  std::size_t IndexOf(std::string_view label) const;
  bool Contains(std::string_view label) const;

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  std::vector<std::string> labels_;
};

class Document {
 public:
  Document(std::string id, std::string text,
           std::optional<std::string> gold_label = std::nullopt);

  const std::string& id() const { return id_; }
  const std::string& text() const { return text_; }
  const std::vector<std::string>& words() const { return words_; }
  const std::optional<std::string>& gold_label() const { return gold_label_; }
  std::size_t size() const { return words_.size(); }
  // Single-space normal form of the text; what models are queried with.
  std::string NormalizedText() const { return Detokenize(words_); }

 private:
  std::string id_;
  std::string text_;
  std::vector<std::string> words_;
  std::optional<std::string> gold_label_;
};

// A distribution over a LabelSet. Validated on construction.
class Prediction {
 public:
  static constexpr double kSumTolerance = 1e-6;

  // Throws std::invalid_argument if any entry is outside [0, 1], non-finite,
  // or the entries do not sum to one within kSumTolerance.
  explicit Prediction(std::vector<double> probs);

  const std::vector<double>& probs() const { return probs_; }
  double prob(std::size_t index) const { return probs_.at(index); }
  // Argmax; ties go to the lowest label index.
  std::size_t predicted_index() const { return predicted_index_; }
  double confidence() const { return probs_[predicted_index_]; }

  friend bool operator==(const Prediction&, const Prediction&) = default;

 private:
  std::vector<double> probs_;
  std::size_t predicted_index_ = 0;
};

// Per-word importance scores and their deterministic ranking.
class Explanation {
 public:
  // scores.size() must equal words.size(); both must be non-empty.
  Explanation(std::vector<std::string> words, std::vector<double> scores);

  const std::vector<std::string>& words() const { return words_; }
  const std::vector<double>& scores() const { return scores_; }
  // Indices by descending score; equal scores keep ascending index order.
  const std::vector<std::size_t>& ranking() const { return ranking_; }
  std::size_t top1_index() const { return ranking_.front(); }
  const std::string& top1_token() const { return words_[ranking_.front()]; }
  double top1_score() const { return scores_[ranking_.front()]; }

  // Lowercased tokens at the first min(k, n) ranks, in rank order. May
  // contain repeats when the text repeats a word.
  std::vector<std::string> TopKRanked(std::size_t k) const;
  // The same tokens as a sorted, duplicate-free set.
  std::vector<std::string> TopKTokens(std::size_t k) const;

 private:
  std::vector<std::string> words_;
  std::vector<double> scores_;
  std::vector<std::size_t> ranking_;
};

}  // namespace xstab

#endif  // XSTAB_CORE_H_
