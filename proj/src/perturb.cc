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

#include "xstab/perturb.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>

#include "xstab/errors.h"
#include "xstab/rng.h"

namespace xstab {
namespace {

bool IsSpaceUnit(std::string_view unit) {
  if (unit.size() != 1) return false;
  const char c = unit[0];
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Splits UTF-8 text into code-point units. A malformed byte becomes a unit of
// its own so the split is total.
std::vector<std::string> SplitCodePoints(std::string_view text) {
  std::vector<std::string> units;
  units.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if (lead >= 0xF0 && lead < 0xF8) {
      len = 4;
    } else if (lead >= 0xE0) {
      len = lead < 0xF0 ? 3 : 1;
    } else if (lead >= 0xC0) {
      len = 2;
    }
    if (i + len > text.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    units.emplace_back(text.substr(i, len));
    i += len;
  }
  return units;
}

std::string Join(const std::vector<std::string>& units) {
  std::string out;
  for (const auto& u : units) out += u;
  return out;
}

std::size_t CountNonSpace(const std::vector<std::string>& units) {
  return static_cast<std::size_t>(
      std::count_if(units.begin(), units.end(),
                    [](const std::string& u) { return !IsSpaceUnit(u); }));
}

bool IsWordChar(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

}  // namespace

std::string_view OpTypeName(OpType op) {
  switch (op) {
    case OpType::kCharSwap:
      return "char_swap";
    case OpType::kCharDelete:
      return "char_delete";
    case OpType::kSynonymReplace:
      return "synonym_replace";
    case OpType::kWordDelete:
      return "word_delete";
    case OpType::kWordShuffle:
      return "word_shuffle";
    case OpType::kBackTranslate:
      return "back_translate";
  }
  return "unknown";
}

OpType ParseOpType(std::string_view name) {
  for (OpType op : kAllOpTypes) {
    if (OpTypeName(op) == name) return op;
  }
  throw ConfigError("unknown perturbation type: " + std::string(name));
}

bool IsWordLevel(OpType op) {
  return op == OpType::kSynonymReplace || op == OpType::kWordDelete ||
         op == OpType::kWordShuffle;
}

Severity Severity::FromFraction(double fraction) {
  for (const Severity& s : kAllSeverities) {
    if (std::abs(s.fraction() - fraction) < 1e-9) return s;
  }
  throw ConfigError("severity must be one of 0.05, 0.10, 0.20; got " +
                    std::to_string(fraction));
}

std::string Severity::Label() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%d.%02d", percent_ / 100, percent_ % 100);
  return buf;
}

std::string GridCell::Id() const {
  return std::string(OpTypeName(op)) + "@" + severity.Label();
}

std::vector<GridCell> FullGrid() {
  std::vector<GridCell> cells;
  for (OpType op : kAllOpTypes) {
    for (const Severity& s : kAllSeverities) cells.push_back({op, s});
  }
  return cells;
}

std::uint64_t CaseSeed(std::uint64_t global_seed, std::string_view document_id,
                       OpType op, Severity severity) {
  std::uint64_t h = HashCombine(global_seed, HashString(document_id));
  h = HashCombine(h, HashString(OpTypeName(op)));
  return HashCombine(h, static_cast<std::uint64_t>(severity.percent()));
}

std::string CaseId(std::string_view document_id, const GridCell& cell) {
  return std::string(document_id) + "|" + cell.Id();
}

// ---------------------------------------------------------------------------
// Synonym lexicon

void SynonymLexicon::Add(std::string_view word,
                         std::span<const std::string> candidates) {
  const std::string key = NormalizeToken(word);
  if (key.empty()) return;
  auto& list = entries_[key];
  for (const auto& candidate : candidates) {
    if (candidate.empty() || ToLowerAscii(candidate) == key) continue;
    if (std::any_of(candidate.begin(), candidate.end(), [](char c) {
          return c == ' ' || c == '\t' || c == '\n' || c == '\r' ||
                 c == '\f' || c == '\v';
        })) {
      continue;
    }
    if (std::find(list.begin(), list.end(), candidate) == list.end()) {
      list.push_back(candidate);
    }
  }
  if (list.empty()) entries_.erase(key);
}

const std::vector<std::string>* SynonymLexicon::Find(
    std::string_view normalized) const {
  auto it = entries_.find(normalized);
  return it == entries_.end() ? nullptr : &it->second;
}

SynonymLexicon SynonymLexicon::Parse(std::istream& in,
                                     const std::string& source_name) {
  SynonymLexicon lexicon;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ConfigError(source_name + ":" + std::to_string(line_no) +
                        ": expected word<TAB>syn1,syn2,...");
    }
    std::vector<std::string> candidates;
    std::string_view rest(line);
    rest.remove_prefix(tab + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      std::string_view item = rest.substr(0, comma);
      while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
      while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
      candidates.emplace_back(item);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    lexicon.Add(line.substr(0, tab), candidates);
  }
  return lexicon;
}

SynonymLexicon SynonymLexicon::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open synonym lexicon " + path);
  return Parse(in, path);
}

// ---------------------------------------------------------------------------
// Character-level operators

std::string SwapAdjacentChars(std::string_view text, std::size_t position) {
  std::vector<std::string> units = SplitCodePoints(text);
  if (position + 1 >= units.size()) {
    throw std::out_of_range("swap position past end of text");
  }
  std::swap(units[position], units[position + 1]);
  return Join(units);
}

TextPerturbation CharSwap(std::string_view text, Severity severity,
                          std::uint64_t seed) {
  std::vector<std::string> units = SplitCodePoints(text);
  TextPerturbation out;
  out.budget = severity.Budget(CountNonSpace(units));
  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i + 1 < units.size(); ++i) {
    if (!IsSpaceUnit(units[i]) && !IsSpaceUnit(units[i + 1])) valid.push_back(i);
  }
  Rng rng(seed);
  for (std::size_t pick : rng.SampleWithoutReplacement(valid.size(), out.budget)) {
    std::swap(units[valid[pick]], units[valid[pick] + 1]);
    ++out.applied;
  }
  out.text = Join(units);
  return out;
}

TextPerturbation CharDelete(std::string_view text, Severity severity,
                            std::uint64_t seed) {
  std::vector<std::string> units = SplitCodePoints(text);
  TextPerturbation out;
  out.budget = severity.Budget(CountNonSpace(units));

  // word_of[i] = index of the word containing unit i, or -1 for whitespace.
  std::vector<long> word_of(units.size(), -1);
  std::vector<std::size_t> remaining;
  bool in_word = false;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (IsSpaceUnit(units[i])) {
      in_word = false;
      continue;
    }
    if (!in_word) remaining.push_back(0);
    in_word = true;
    word_of[i] = static_cast<long>(remaining.size() - 1);
    ++remaining.back();
  }

  std::vector<bool> deleted(units.size(), false);
  Rng rng(seed);
  std::vector<std::size_t> eligible;
  for (std::size_t step = 0; step < out.budget; ++step) {
    eligible.clear();
    for (std::size_t i = 0; i < units.size(); ++i) {
      if (word_of[i] >= 0 && !deleted[i] && remaining[word_of[i]] >= 2) {
        eligible.push_back(i);
      }
    }
    if (eligible.empty()) break;
    const std::size_t i = eligible[rng.UniformIndex(eligible.size())];
    deleted[i] = true;
    --remaining[word_of[i]];
    ++out.applied;
  }
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!deleted[i]) out.text += units[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Word-level operators

WordPerturbation SynonymReplace(std::span<const std::string> words,
                                Severity severity, std::uint64_t seed,
                                const SynonymLexicon& lexicon) {
  WordPerturbation out;
  out.words.assign(words.begin(), words.end());
  out.budget = severity.Budget(words.size());

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (IsContentWord(words[i]) && lexicon.Find(NormalizeToken(words[i]))) {
      eligible.push_back(i);
    }
  }
  Rng rng(seed);
  for (std::size_t pick : rng.SampleWithoutReplacement(eligible.size(), out.budget)) {
    const std::size_t pos = eligible[pick];
    const std::string& word = words[pos];
    const auto& candidates = *lexicon.Find(NormalizeToken(word));
    std::string replacement = candidates[rng.UniformIndex(candidates.size())];

    std::size_t begin = 0;
    std::size_t end = word.size();
    while (begin < end && !IsWordChar(static_cast<unsigned char>(word[begin]))) ++begin;
    while (end > begin && !IsWordChar(static_cast<unsigned char>(word[end - 1]))) --end;
    if (word[begin] >= 'A' && word[begin] <= 'Z' && !replacement.empty() &&
        replacement[0] >= 'a' && replacement[0] <= 'z') {
      replacement[0] = static_cast<char>(replacement[0] - 'a' + 'A');
    }
    out.words[pos] = word.substr(0, begin) + replacement + word.substr(end);
    ++out.applied;
  }
  return out;
}

WordPerturbation WordDelete(std::span<const std::string> words,
                            Severity severity, std::uint64_t seed) {
  std::vector<std::size_t> content;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (IsContentWord(words[i])) content.push_back(i);
  }
  if (content.empty()) {
    throw PreconditionError("word_delete needs at least one content word");
  }
  WordPerturbation out;
  out.budget = severity.Budget(words.size());

  // Whole-selection rejection keeps the draw uniform over valid selections.
  // With d <= n/5 a single content word survives with probability >= 0.8,
  // so the fallback below is practically unreachable.
  constexpr int kMaxDraws = 1000;
  Rng rng(seed);
  std::vector<bool> removed(words.size(), false);
  bool found = false;
  for (int draw = 0; draw < kMaxDraws && !found; ++draw) {
    std::fill(removed.begin(), removed.end(), false);
    for (std::size_t i : rng.SampleWithoutReplacement(words.size(), out.budget)) {
      removed[i] = true;
    }
    found = std::any_of(content.begin(), content.end(),
                        [&](std::size_t i) { return !removed[i]; });
  }
  if (!found) {
    const std::size_t keep = content[rng.UniformIndex(content.size())];
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i != keep) others.push_back(i);
    }
    std::fill(removed.begin(), removed.end(), false);
    for (std::size_t pick : rng.SampleWithoutReplacement(others.size(), out.budget)) {
      removed[others[pick]] = true;
    }
  }
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!removed[i]) out.words.push_back(words[i]);
  }
  out.applied = words.size() - out.words.size();
  return out;
}

std::vector<std::string> ShuffleWindow(std::span<const std::string> words,
                                       std::size_t anchor,
                                       std::span<const std::size_t> permutation) {
  const std::size_t end = std::min(anchor + kShuffleWindow, words.size());
  if (anchor >= end || permutation.size() != end - anchor) {
    throw std::invalid_argument("permutation does not match the window");
  }
  std::vector<std::string> out(words.begin(), words.end());
  for (std::size_t k = 0; k < permutation.size(); ++k) {
    out[anchor + k] = words[anchor + permutation[k]];
  }
  return out;
}

WordPerturbation WordShuffle(std::span<const std::string> words,
                             Severity severity, std::uint64_t seed) {
  WordPerturbation out;
  out.words.assign(words.begin(), words.end());
  out.budget = severity.Budget(words.size());
  Rng rng(seed);
  std::vector<std::size_t> anchors =
      rng.SampleWithoutReplacement(words.size(), out.budget);
  std::sort(anchors.begin(), anchors.end());
  for (std::size_t anchor : anchors) {
    const std::size_t width = std::min(kShuffleWindow, words.size() - anchor);
    std::vector<std::size_t> perm(width);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.Shuffle(std::span<std::size_t>(perm));
    out.words = ShuffleWindow(out.words, anchor, perm);
    ++out.applied;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grid

namespace {

PairedCase AssembleCase(const Document& document,
                        const PerturbationConfig& config, std::string text,
                        std::size_t budget, std::size_t applied) {
  Document perturbed(CaseId(document.id(), {config.op, config.severity}),
                     std::move(text), document.gold_label());
  if (perturbed.words().empty()) {
    throw PreconditionError("perturbed text is empty");
  }
  return PairedCase{document, std::move(perturbed), config, budget, applied,
                    config.op == OpType::kBackTranslate};
}

}  // namespace

PairedCase Perturb(const Document& document, const PerturbationConfig& config,
                   const SynonymLexicon& lexicon, Translator& translator) {
  const std::string normalized = document.NormalizedText();
  std::string text;
  std::size_t budget = 0;
  std::size_t applied = 0;
  auto take_text = [&](TextPerturbation p) {
    text = std::move(p.text);
    budget = p.budget;
    applied = p.applied;
  };
  auto take_words = [&](WordPerturbation p) {
    text = Detokenize(p.words);
    budget = p.budget;
    applied = p.applied;
  };
  switch (config.op) {
    case OpType::kCharSwap:
      take_text(CharSwap(normalized, config.severity, config.seed));
      break;
    case OpType::kCharDelete:
      take_text(CharDelete(normalized, config.severity, config.seed));
      break;
    case OpType::kSynonymReplace:
      take_words(SynonymReplace(document.words(), config.severity, config.seed, lexicon));
      break;
    case OpType::kWordDelete:
      take_words(WordDelete(document.words(), config.severity, config.seed));
      break;
    case OpType::kWordShuffle:
      take_words(WordShuffle(document.words(), config.severity, config.seed));
      break;
    case OpType::kBackTranslate:
      text = BackTranslate(normalized, translator);
      break;
  }
  return AssembleCase(document, config, std::move(text), budget, applied);
}

PerturbationGrid BuildPerturbationGrid(std::span<const Document> documents,
                                       std::span<const GridCell> cells,
                                       const SynonymLexicon& lexicon,
                                       Translator& translator,
                                       std::uint64_t global_seed) {
  PerturbationGrid grid;
  grid.cases.reserve(documents.size() * cells.size());
  for (const Document& doc : documents) {
    // Back-translation does not depend on severity: translate once per
    // document and reuse the result (or the failure) for every replicate cell.
    std::optional<std::string> bt_text;
    std::optional<std::string> bt_error;
    for (const GridCell& cell : cells) {
      const PerturbationConfig config{
          cell.op, cell.severity,
          CaseSeed(global_seed, doc.id(), cell.op, cell.severity)};
      try {
        if (cell.op == OpType::kBackTranslate) {
          if (!bt_text && !bt_error) {
            try {
              bt_text = BackTranslate(doc.NormalizedText(), translator);
            } catch (const Error& e) {
              bt_error = e.what();
            }
          }
          if (bt_error) throw TranslationError(*bt_error);
          grid.cases.push_back(AssembleCase(doc, config, *bt_text, 0, 0));
        } else {
          grid.cases.push_back(Perturb(doc, config, lexicon, translator));
        }
      } catch (const Error& e) {
        grid.skipped.push_back({CaseId(doc.id(), cell), doc.id(), cell.op,
                                cell.severity, doc.NormalizedText(), e.what()});
      }
    }
  }
  return grid;
}

}  // namespace xstab
