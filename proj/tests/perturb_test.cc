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
#include <sstream>

#include "gtest/gtest.h"
#include "xstab/errors.h"
#include "xstab/rng.h"

namespace xstab {
namespace {

using Words = std::vector<std::string>;

std::size_t CodePoints(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80 && c != ' ' && c != '\t' && c != '\n') ++n;
  }
  return n;
}

TEST(SeverityTest, GridValuesAndBudgets) {
  EXPECT_EQ(Severity::FromFraction(0.05), Severity::k05);
  EXPECT_EQ(Severity::FromFraction(0.1), Severity::k10);
  EXPECT_THROW(Severity::FromFraction(0.15), ConfigError);
  EXPECT_EQ(Severity::k10.Label(), "0.10");
  // 0.05 * 20 and 0.10 * 10 must not fall just below an integer.
  EXPECT_EQ(Severity::k05.Budget(20), 1u);
  EXPECT_EQ(Severity::k10.Budget(10), 1u);
  EXPECT_EQ(Severity::k20.Budget(10), 2u);
  EXPECT_EQ(Severity::k05.Budget(19), 0u);
  EXPECT_EQ(Severity::k20.Budget(6), 1u);
}

TEST(GridTest, EighteenCells) {
  const auto grid = FullGrid();
  ASSERT_EQ(grid.size(), 18u);
  EXPECT_EQ(grid.front().Id(), "char_swap@0.05");
  EXPECT_EQ(grid.back().Id(), "back_translate@0.20");
  EXPECT_EQ(CaseId("doc7", grid[1]), "doc7|char_swap@0.10");
  for (OpType op : kAllOpTypes) EXPECT_EQ(ParseOpType(OpTypeName(op)), op);
  EXPECT_THROW(ParseOpType("rot13"), ConfigError);
}

TEST(CaseSeedTest, DependsOnEveryComponent) {
  const auto base = CaseSeed(1, "d", OpType::kCharSwap, Severity::k05);
  EXPECT_EQ(base, CaseSeed(1, "d", OpType::kCharSwap, Severity::k05));
  EXPECT_NE(base, CaseSeed(2, "d", OpType::kCharSwap, Severity::k05));
  EXPECT_NE(base, CaseSeed(1, "e", OpType::kCharSwap, Severity::k05));
  EXPECT_NE(base, CaseSeed(1, "d", OpType::kCharDelete, Severity::k05));
  EXPECT_NE(base, CaseSeed(1, "d", OpType::kCharSwap, Severity::k10));
}

TEST(CharSwapTest, Examples) {
  const auto one = CharSwap("abcde fghij", Severity::k10, 1);
  EXPECT_EQ(one.budget, 1u);
  EXPECT_EQ(one.applied, 1u);
  EXPECT_NE(one.text, "abcde fghij");

  const std::string nineteen = "abcdefghij klmnopqrs";
  const auto zero = CharSwap(nineteen, Severity::k05, 1);
  EXPECT_EQ(zero.budget, 0u);
  EXPECT_EQ(zero.text, nineteen);

  EXPECT_EQ(SwapAdjacentChars("abcd", 1), "acbd");
  EXPECT_EQ(SwapAdjacentChars("añb", 0), "ñab");
}

TEST(CharSwapTest, NeverCrossesWordsAndKeepsMultiset) {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::string text = "the quick brown fox jumps over a lazy dog";
    const auto out = CharSwap(text, kAllSeverities[trial % 3], rng.Next());
    const Words a = Tokenize(text), b = Tokenize(out.text);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::string x = a[i], y = b[i];
      std::sort(x.begin(), x.end());
      std::sort(y.begin(), y.end());
      EXPECT_EQ(x, y);
    }
  }
}

TEST(CharDeleteTest, Examples) {
  const auto out = CharDelete("cat hat", Severity::k20, 5);
  EXPECT_EQ(out.budget, 1u);
  EXPECT_EQ(out.applied, 1u);
  EXPECT_EQ(CodePoints(out.text), 5u);
  EXPECT_EQ(Tokenize(out.text).size(), 2u);

  const auto none = CharDelete("cat hat", Severity::k05, 5);
  EXPECT_EQ(none.text, "cat hat");
}

TEST(CharDeleteTest, SingleCharacterWordsSurvive) {
  const auto out = CharDelete("a b c d e f g h i j", Severity::k20, 3);
  EXPECT_EQ(out.budget, 2u);
  EXPECT_EQ(out.applied, 0u);
  EXPECT_EQ(out.text, "a b c d e f g h i j");
}

TEST(CharDeleteTest, CountsCodePoints) {
  const std::string text = "ééééé ééééé";
  const auto out = CharDelete(text, Severity::k10, 2);
  EXPECT_EQ(out.budget, 1u);
  EXPECT_EQ(CodePoints(out.text), 9u);
}

TEST(SynonymReplaceTest, Examples) {
  SynonymLexicon lexicon;
  const Words fine = {"fine"};
  lexicon.Add("good", fine);
  const Words doc = {"the", "good", "film", "is", "here"};
  const auto out = SynonymReplace(doc, Severity::k20, 1, lexicon);
  EXPECT_EQ(out.budget, 1u);
  EXPECT_EQ(out.words, (Words{"the", "fine", "film", "is", "here"}));

  const auto empty = SynonymReplace(doc, Severity::k20, 1, SynonymLexicon());
  EXPECT_EQ(empty.words, doc);
  EXPECT_EQ(empty.applied, 0u);
  EXPECT_EQ(empty.budget, 1u);
}

TEST(SynonymReplaceTest, ExactBudgetWhenAllEligible) {
  SynonymLexicon lexicon;
  Words doc;
  for (int i = 0; i < 10; ++i) {
    const std::string w = "word" + std::to_string(i);
    const Words alt = {w + "x"};
    lexicon.Add(w, alt);
    doc.push_back(w);
  }
  const auto out = SynonymReplace(doc, Severity::k20, 9, lexicon);
  EXPECT_EQ(out.applied, 2u);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < doc.size(); ++i) changed += doc[i] != out.words[i];
  EXPECT_EQ(changed, 2u);
}

TEST(SynonymReplaceTest, KeepsPunctuationAndCapital) {
  SynonymLexicon lexicon;
  const Words fine = {"fine"};
  lexicon.Add("good", fine);
  const Words doc = {"\"Good!\"", "a", "b", "c", "d"};
  const auto out = SynonymReplace(doc, Severity::k20, 1, lexicon);
  EXPECT_EQ(out.words[0], "\"Fine!\"");
}

TEST(SynonymLexiconTest, ParsesAndDropsBadCandidates) {
  std::istringstream in("# header\ngood\tfine, good ,nice,two words\nbad\tpoor\n");
  const auto lexicon = SynonymLexicon::Parse(in, "mem");
  EXPECT_EQ(lexicon.size(), 2u);
  ASSERT_NE(lexicon.Find("good"), nullptr);
  EXPECT_EQ(*lexicon.Find("good"), (Words{"fine", "nice"}));
  EXPECT_EQ(lexicon.Find("film"), nullptr);
  std::istringstream broken("good fine\n");
  EXPECT_THROW(SynonymLexicon::Parse(broken, "mem"), ConfigError);
}

TEST(WordDeleteTest, Examples) {
  Words doc;
  for (int i = 0; i < 20; ++i) doc.push_back("w" + std::to_string(i));
  EXPECT_EQ(WordDelete(doc, Severity::k10, 4).words.size(), 18u);
  EXPECT_EQ(WordDelete(doc, Severity::k05, 4).words.size(), 19u);

  const Words short_doc = {"the", "film", "is"};
  EXPECT_EQ(WordDelete(short_doc, Severity::k20, 4).words, short_doc);
}

TEST(WordDeleteTest, LastContentWordSurvives) {
  const Words doc = {"the", "film", "is", "a", "it"};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto out = WordDelete(doc, Severity::k20, seed);
    EXPECT_EQ(out.applied, 1u);
    EXPECT_NE(std::find(out.words.begin(), out.words.end(), "film"), out.words.end());
  }
}

TEST(WordDeleteTest, NoContentWordIsPrecondition) {
  const Words doc = {"the", "a", "is", "it", "of"};
  EXPECT_THROW(WordDelete(doc, Severity::k20, 1), PreconditionError);
}

TEST(WordShuffleTest, Examples) {
  EXPECT_EQ(ShuffleWindow(Words{"a", "b", "c"}, 0, std::vector<std::size_t>{2, 1, 0}),
            (Words{"c", "b", "a"}));
  EXPECT_EQ(ShuffleWindow(Words{"a", "b", "c", "d"}, 2, std::vector<std::size_t>{1, 0}),
            (Words{"a", "b", "d", "c"}));

  Words doc;
  for (int i = 0; i < 10; ++i) doc.push_back("w" + std::to_string(i));
  const auto out = WordShuffle(doc, Severity::k10, 3);
  EXPECT_EQ(out.budget, 1u);
  Words a = doc, b = out.words;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
  std::size_t first = doc.size(), last = 0;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (doc[i] != out.words[i]) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first < doc.size()) EXPECT_LT(last - first, kShuffleWindow);

  const Words short_doc = {"a", "b", "c"};
  EXPECT_EQ(WordShuffle(short_doc, Severity::k20, 3).words, short_doc);
}

TEST(BackTranslateTest, Doubles) {
  IdentityTranslator identity;
  EXPECT_EQ(BackTranslate("good film", identity), "good film");
  DictionaryTranslator dict({{"good", "gut"}}, {{"gut", "fine"}});
  EXPECT_EQ(BackTranslate("good film", dict), "fine film");
  DictionaryTranslator eraser({{"good", ""}}, {});
  EXPECT_THROW(BackTranslate("good", eraser), TranslationError);
}

TEST(PerturbTest, DeterministicPerSeed) {
  SynonymLexicon lexicon;
  IdentityTranslator mt;
  const Document doc("d", "The plot was thin but the acting felt honest and warm today");
  for (const auto& cell : FullGrid()) {
    const PerturbationConfig config{cell.op, cell.severity, 77};
    const auto a = Perturb(doc, config, lexicon, mt);
    const auto b = Perturb(doc, config, lexicon, mt);
    EXPECT_EQ(a.perturbed.text(), b.perturbed.text());
    EXPECT_EQ(a.case_id(), CaseId("d", cell));
  }
}

TEST(PerturbationGridTest, OneDocumentEighteenCases) {
  SynonymLexicon lexicon;
  IdentityTranslator mt;
  const std::vector<Document> docs = {
      Document("d0", "a remarkably tender film about growing older together")};
  const auto cells = FullGrid();
  const auto grid = BuildPerturbationGrid(docs, cells, lexicon, mt, 5);
  ASSERT_EQ(grid.cases.size(), 18u);
  EXPECT_TRUE(grid.skipped.empty());
  std::vector<std::string> bt;
  for (const auto& c : grid.cases) {
    if (c.config.op == OpType::kBackTranslate) {
      EXPECT_TRUE(c.replicate);
      bt.push_back(c.perturbed.text());
    }
  }
  ASSERT_EQ(bt.size(), 3u);
  EXPECT_EQ(bt[0], bt[1]);
  EXPECT_EQ(bt[1], bt[2]);

  EXPECT_TRUE(BuildPerturbationGrid({}, cells, lexicon, mt, 5).cases.empty());
}

TEST(PerturbationGridTest, FailuresBecomeSkips) {
  SynonymLexicon lexicon;
  DictionaryTranslator eraser({{"the", ""}, {"a", ""}, {"is", ""}, {"of", ""}}, {});
  const std::vector<Document> docs = {Document("d0", "the a is of")};
  const auto cells = FullGrid();
  const auto grid = BuildPerturbationGrid(docs, cells, lexicon, eraser, 5);
  // Three word_delete cells lack a content word; three back_translate cells
  // lose their translation.
  EXPECT_EQ(grid.cases.size(), 12u);
  ASSERT_EQ(grid.skipped.size(), 6u);
  for (const auto& s : grid.skipped) {
    EXPECT_TRUE(s.op == OpType::kWordDelete || s.op == OpType::kBackTranslate);
  }
}

}  // namespace
}  // namespace xstab
