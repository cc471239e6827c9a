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

#ifndef XSTAB_PERTURB_H_
#define XSTAB_PERTURB_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xstab/core.h"
#include "xstab/translate.h"

namespace xstab {

enum class OpType {
  kCharSwap,
  kCharDelete,
  kSynonymReplace,
  kWordDelete,
  kWordShuffle,
  kBackTranslate,
};

inline constexpr std::array<OpType, 6> kAllOpTypes = {
    OpType::kCharSwap,    OpType::kCharDelete,  OpType::kSynonymReplace,
    OpType::kWordDelete,  OpType::kWordShuffle, OpType::kBackTranslate};

std::string_view OpTypeName(OpType op);
// Throws ConfigError.
OpType ParseOpType(std::string_view name);
bool IsWordLevel(OpType op);

// One of the three grid severities, stored as an integer percentage so that
// budgets are exact integer floors.
class Severity {
 public:
  static const Severity k05;
  static const Severity k10;
  static const Severity k20;

  // Accepts 0.05, 0.10 and 0.20 (within 1e-9); throws ConfigError otherwise.
  static Severity FromFraction(double fraction);

  int percent() const { return percent_; }
  double fraction() const { return percent_ / 100.0; }
  // "0.05", "0.10", "0.20".
  std::string Label() const;
  // floor(severity * count).
  std::size_t Budget(std::size_t count) const {
    return static_cast<std::size_t>(percent_) * count / 100;
  }

  friend auto operator<=>(const Severity&, const Severity&) = default;

 private:
  constexpr explicit Severity(int percent) : percent_(percent) {}
  int percent_;
};

inline const Severity Severity::k05{5};
inline const Severity Severity::k10{10};
inline const Severity Severity::k20{20};

inline const std::array<Severity, 3> kAllSeverities = {
    Severity::k05, Severity::k10, Severity::k20};

// (operator, severity) cell of the grid.
struct GridCell {
  OpType op;
  Severity severity;
  // "char_swap@0.05".
  std::string Id() const;
  friend bool operator==(const GridCell&, const GridCell&) = default;
};

// All 18 cells, operator-major.
std::vector<GridCell> FullGrid();

struct PerturbationConfig {
  OpType op;
  Severity severity;
  std::uint64_t seed;
};

// seed = f(global_seed, document id, operator, severity); independent of
// iteration order so any subset of the grid can be recomputed alone.
std::uint64_t CaseSeed(std::uint64_t global_seed, std::string_view document_id,
                       OpType op, Severity severity);

// word -> candidate synonyms. Candidates never equal their key
// (case-insensitively) and never contain whitespace.
class SynonymLexicon {
 public:
  // Drops candidates that violate the invariants; keeps first-seen order.
  void Add(std::string_view word, std::span<const std::string> candidates);
  // `normalized` is a NormalizeToken() result. nullptr when absent.
  const std::vector<std::string>* Find(std::string_view normalized) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // `word<TAB>syn1,syn2,...` per line, UTF-8, '#' comment lines.
  static SynonymLexicon Parse(std::istream& in, const std::string& source_name);
  static SynonymLexicon Load(const std::string& path);

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
};

struct TextPerturbation {
  std::string text;
  std::size_t budget = 0;
  std::size_t applied = 0;
};

struct WordPerturbation {
  std::vector<std::string> words;
  std::size_t budget = 0;
  std::size_t applied = 0;
};

// Exchanges the code points at `position` and `position + 1`.
std::string SwapAdjacentChars(std::string_view text, std::size_t position);

// floor(s*C) swaps of intra-word adjacent code-point pairs, C = non-whitespace
// code points. Each pair is used at most once; clamped to the pairs available.
TextPerturbation CharSwap(std::string_view text, Severity severity,
                          std::uint64_t seed);

// floor(s*C) non-whitespace code points removed; every word keeps at least
// one. Clamped to C minus the word count.
TextPerturbation CharDelete(std::string_view text, Severity severity,
                            std::uint64_t seed);

// floor(s*n) content words with lexicon candidates replaced by a seeded
// candidate. Edge punctuation and a leading capital are carried over.
// applied < budget records the shortfall.
WordPerturbation SynonymReplace(std::span<const std::string> words,
                                Severity severity, std::uint64_t seed,
                                const SynonymLexicon& lexicon);

// Removes floor(s*n) words uniformly, redrawing any selection that would
// leave no content word. Throws PreconditionError if `words` has no content
// word.
WordPerturbation WordDelete(std::span<const std::string> words,
                            Severity severity, std::uint64_t seed);

inline constexpr std::size_t kShuffleWindow = 3;

// Permutes words[anchor, anchor + kShuffleWindow) (clipped) by
// `permutation`, a permutation of 0..window-1.
std::vector<std::string> ShuffleWindow(std::span<const std::string> words,
                                       std::size_t anchor,
                                       std::span<const std::size_t> permutation);

// floor(s*n) distinct anchors; each window gets a seeded uniform permutation.
WordPerturbation WordShuffle(std::span<const std::string> words,
                             Severity severity, std::uint64_t seed);

struct PairedCase {
  Document original;
  Document perturbed;
  PerturbationConfig config;
  std::size_t budget = 0;
  std::size_t applied = 0;
  // Back-translation cells share one transformation across severities.
  bool replicate = false;

  const std::string& case_id() const { return perturbed.id(); }
};

struct SkippedCase {
  std::string case_id;
  std::string document_id;
  OpType op;
  Severity severity;
  std::string original_text;
  std::string reason;
};

struct PerturbationGrid {
  std::vector<PairedCase> cases;
  std::vector<SkippedCase> skipped;
};

// document id + "|" + cell id.
std::string CaseId(std::string_view document_id, const GridCell& cell);

// Applies one operator to a document. Throws PreconditionError or
// TranslationError when the case cannot be built.
PairedCase Perturb(const Document& document, const PerturbationConfig& config,
                   const SynonymLexicon& lexicon, Translator& translator);

// Document-major, cells in the given order. Built once per run and reused
// for every model.
PerturbationGrid BuildPerturbationGrid(std::span<const Document> documents,
                                       std::span<const GridCell> cells,
                                       const SynonymLexicon& lexicon,
                                       Translator& translator,
                                       std::uint64_t global_seed);

}  // namespace xstab

#endif  // XSTAB_PERTURB_H_
