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

#include "xstab/core.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace xstab {
namespace {

bool IsSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsWordByte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !IsSpace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) words.emplace_back(text.substr(start, i - start));
  }
  return words;
}

std::string Detokenize(std::span<const std::string> words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += words[i];
  }
  return out;
}

std::string ToLowerAscii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string NormalizeToken(std::string_view token) {
  std::size_t begin = 0;
  std::size_t end = token.size();
  while (begin < end && !IsWordByte(static_cast<unsigned char>(token[begin]))) {
    ++begin;
  }
  while (end > begin && !IsWordByte(static_cast<unsigned char>(token[end - 1]))) {
    --end;
  }
  return ToLowerAscii(token.substr(begin, end - begin));
}

bool IsContentWord(std::string_view token) {
  const std::string core = NormalizeToken(token);
  return !core.empty() && !IsStopword(core);
}

LabelSet::LabelSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.size() < 2) {
    throw std::invalid_argument("label set needs at least two labels");
  }
  std::unordered_set<std::string> seen;
  for (const auto& label : labels_) {
    if (label.empty()) throw std::invalid_argument("empty label name");
    if (!seen.insert(label).second) {
      throw std::invalid_argument("duplicate label: " + label);
    }
  }
}

std::size_t LabelSet::IndexOf(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    throw std::out_of_range("unknown label: " + std::string(label));
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

bool LabelSet::Contains(std::string_view label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

Document::Document(std::string id, std::string text,
                   std::optional<std::string> gold_label)
    : id_(std::move(id)),
      text_(std::move(text)),
      words_(Tokenize(text_)),
      gold_label_(std::move(gold_label)) {}

Prediction::Prediction(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("empty distribution");
  double sum = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw std::invalid_argument("probability outside [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument("probabilities do not sum to one");
  }
  // std::max_element returns the first maximum, i.e. the lowest index.
  predicted_index_ = static_cast<std::size_t>(
      std::max_element(probs_.begin(), probs_.end()) - probs_.begin());
}

Explanation::Explanation(std::vector<std::string> words,
                         std::vector<double> scores)
    : words_(std::move(words)), scores_(std::move(scores)) {
  if (words_.empty()) throw std::invalid_argument("explanation of empty text");
  if (words_.size() != scores_.size()) {
    throw std::invalid_argument("score count does not match word count");
  }
  for (double s : scores_) {
    if (!std::isfinite(s)) throw std::invalid_argument("non-finite score");
  }
  ranking_.resize(scores_.size());
  std::iota(ranking_.begin(), ranking_.end(), std::size_t{0});
  std::stable_sort(ranking_.begin(), ranking_.end(),
                   [this](std::size_t a, std::size_t b) {
                     return scores_[a] > scores_[b];
                   });
}

std::vector<std::string> Explanation::TopKRanked(std::size_t k) const {
  const std::size_t m = std::min(k, ranking_.size());
  std::vector<std::string> out;
  out.reserve(m);
  for (std::size_t r = 0; r < m; ++r) {
    out.push_back(ToLowerAscii(words_[ranking_[r]]));
  }
  return out;
}

std::vector<std::string> Explanation::TopKTokens(std::size_t k) const {
  std::vector<std::string> out = TopKRanked(k);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace xstab
