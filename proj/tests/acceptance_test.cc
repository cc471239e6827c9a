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

// Runs the ten acceptance checks and prints one PASS/FAIL line per check.
// Exit status is nonzero if any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "test_util.h"
#include "xstab/cost.h"
#include "xstab/explain.h"
#include "xstab/metrics.h"
#include "xstab/perturb.h"
#include "xstab/runner.h"

namespace xstab {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::vector<std::string> kFiller = {"the", "a", "of", "and", "it", "was",
                                          "very", "this", "with", "is"};

// ---------------------------------------------------------------------------
// 1. 200 documents x 18 cells = 3,600 paired cases per model.

Outcome GridArithmetic() {
  const fs::path dir = test::FreshDir("ac1");
  Rng rng(1);
  const std::vector<std::string> content = {"film",  "story", "actor", "score",
                                            "scene", "plot",  "good",  "bad",
                                            "dull",  "great", "cast",  "pace"};
  {
    std::ofstream out(dir / "docs.jsonl");
    for (int i = 0; i < 200; ++i) {
      std::vector<std::string> words;
      const std::size_t n = 8 + rng.UniformIndex(25);
      for (std::size_t k = 0; k < n; ++k) {
        words.push_back(rng.Bernoulli(0.6) ? content[rng.UniformIndex(content.size())]
                                           : kFiller[rng.UniformIndex(kFiller.size())]);
      }
      words[rng.UniformIndex(n)] = content[rng.UniformIndex(content.size())];
      out << json{{"id", "s" + std::to_string(i)}, {"text", Detokenize(words)}}.dump()
          << "\n";
    }
  }
  const json j = {
      {"global_seed", 2024},
      {"dataset", {{"path", "docs.jsonl"}, {"name", "synthetic"}}},
      {"sample_size", 200},
      {"models",
       {{{"name", "toy"},
         {"kind", "builtin_toy"},
         {"labels", {"pos", "neg"}},
         {"lexicon", {{"good", 1.0}, {"great", 1.5}, {"bad", -1.2}, {"dull", -0.8}}}}}},
      {"translator", {{"kind", "identity"}}},
      {"output_dir", "run"}};
  const RunConfig config = ParseRunConfig(j, dir);
  const auto start = Clock::now();
  const PreparedRun prepared = PrepareRun(config);
  const RunSummary summary = ExecuteRun(config);
  const double elapsed = Seconds(start);
  const std::size_t cases = prepared.grid.cases.size();
  const bool pass = prepared.documents.size() == 200 && config.cells.size() == 18 &&
                    cases == 3600 && prepared.grid.skipped.empty() &&
                    summary.ok == 3600 && summary.expected == 3600 && elapsed < 10.0;
  return {pass, std::to_string(prepared.documents.size()) + " docs x " +
                    std::to_string(config.cells.size()) + " cells = " +
                    std::to_string(cases) + " cases, " + std::to_string(summary.ok) +
                    " ok records, full run " + Fmt("%.2f s (< 10 s)", elapsed)};
}

// ---------------------------------------------------------------------------
// 2. Cold-cache LOO issues exactly n + 1 cache-miss predictions.

Outcome QueryBudget() {
  Rng rng(2);
  std::vector<std::string> vocab;
  for (int i = 0; i < 120; ++i) vocab.push_back("v" + std::to_string(i));
  const Lexicon lexicon = test::RandomLexicon(rng, 60);
  std::size_t checked = 0;
  for (std::size_t n = 1; n <= 50; ++n) {
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<std::string> words;
      for (std::size_t k : rng.SampleWithoutReplacement(vocab.size(), n)) {
        // Mix lexicon hits (w*) and misses (v*), all distinct.
        words.push_back(k % 2 ? vocab[k] : "w" + std::to_string(k / 2));
      }
      auto cache = std::make_shared<QueryCache>();
      auto model = test::ToyClient(lexicon, cache);
      const auto result = ExplainLoo(*model, Document("d", Detokenize(words)));
      if (cache->QueryCount("toy") != n + 1 || result.predict_calls != n + 1 ||
          ExplanationQueryCost(n) != n + 1) {
        return {false, "n=" + std::to_string(n) + ": " +
                           std::to_string(cache->QueryCount("toy")) + " misses"};
      }
      ++checked;
    }
  }
  return {true, std::to_string(checked) + " documents, n = 1..50, misses == n + 1"};
}

// ---------------------------------------------------------------------------
// 3. LOO scores equal sigma(L) - sigma(L - w_i) on the toy model.

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Outcome LooOracle() {
  Rng rng(3);
  double worst = 0.0;
  std::size_t scores = 0;
  for (int doc = 0; doc < 1000; ++doc) {
    const Lexicon lexicon = test::RandomLexicon(rng, 5 + rng.UniformIndex(40), 3.0);
    std::vector<std::string> words;
    std::vector<double> weights;
    const std::size_t n = 1 + rng.UniformIndex(30);
    for (std::size_t k = 0; k < n; ++k) {
      auto it = lexicon.begin();
      std::advance(it, static_cast<long>(rng.UniformIndex(lexicon.size())));
      words.push_back(it->first);
      weights.push_back(it->second);
    }
    double logit = 0.0;
    for (double w : weights) logit += w;
    auto model = test::ToyClient(lexicon);
    const auto result = ExplainLoo(*model, Document("d", Detokenize(words)));
    const bool positive = Sigmoid(logit) >= 0.5;
    for (std::size_t i = 0; i < n; ++i) {
      double without = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != i) without += weights[k];
      }
      double expected = Sigmoid(logit) - Sigmoid(without);
      if (!positive) expected = -expected;
      worst = std::max(worst, std::abs(result.explanation.scores()[i] - expected));
      ++scores;
    }
  }
  return {worst <= 1e-12, std::to_string(scores) + " scores over 1000 documents, max |err| = " +
                              Fmt("%.3g (<= 1e-12)", worst)};
}

// ---------------------------------------------------------------------------
// 4. Perturbation budgets and safeguards.

std::size_t NonSpaceCodePoints(const std::string& s) {
  std::size_t count = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80 && !std::isspace(c)) ++count;
  }
  return count;
}

std::size_t CodePointLength(const std::string& s) {
  std::size_t count = 0;
  for (unsigned char c : s) count += (c & 0xC0) != 0x80;
  return count;
}

std::vector<std::string> Sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::string SortedChars(const std::string& s) {
  std::string t = s;
  std::sort(t.begin(), t.end());
  return t;
}

Outcome PerturbationBudgets() {
  Rng rng(4);
  const std::vector<std::string> vocab = {
      "film", "Story", "acting!", "(great)", "x", "I", "café", "naïve", "résumé",
      "pace,", "bad", "ok", "the", "a", "of", "and", "it", "is", "...", "—",
      "wonderful", "dull.", "plot", "zé", "é", "2024", "don't", "music"};
  SynonymLexicon lexicon;
  for (const auto& [w, syns] : std::vector<std::pair<std::string, std::vector<std::string>>>{
           {"film", {"movie", "picture"}},
           {"story", {"tale"}},
           {"great", {"superb"}},
           {"bad", {"poor", "awful"}},
           {"plot", {"storyline"}},
           {"music", {"score"}},
           {"wonderful", {"marvelous"}}}) {
    lexicon.Add(w, syns);
  }

  std::map<std::string, std::size_t> checked;
  std::size_t exact_budget = 0;
  std::string failure;
  auto fail = [&](const std::string& what, const std::string& text) {
    if (failure.empty()) failure = what + " on \"" + text + "\"";
  };

  for (int draw = 0; draw < 10000; ++draw) {
    const std::size_t n = 1 + rng.UniformIndex(40);
    std::vector<std::string> words;
    for (std::size_t k = 0; k < n; ++k) words.push_back(vocab[rng.UniformIndex(vocab.size())]);
    const std::string text = Detokenize(words);
    const Severity severity = kAllSeverities[rng.UniformIndex(3)];
    const OpType op = kAllOpTypes[rng.UniformIndex(5)];  // all but back_translate
    const std::uint64_t seed = rng.Next();
    const std::size_t c = NonSpaceCodePoints(text);
    const auto floor_of = [&](std::size_t count) {
      return static_cast<std::size_t>(std::floor(severity.fraction() * count + 1e-9));
    };
    ++checked[std::string(OpTypeName(op))];

    switch (op) {
      case OpType::kCharSwap: {
        const auto out = CharSwap(text, severity, seed);
        std::size_t slots = 0;
        for (const auto& w : words) slots += CodePointLength(w) - 1;
        const auto after = Tokenize(out.text);
        if (out.budget != floor_of(c)) fail("char_swap budget", text);
        if (out.applied != std::min(out.budget, slots)) fail("char_swap applied", text);
        if (after.size() != n) fail("char_swap word count", text);
        for (std::size_t i = 0; i < std::min(n, after.size()); ++i) {
          if (SortedChars(after[i]) != SortedChars(words[i])) fail("char_swap chars", text);
        }
        break;
      }
      case OpType::kCharDelete: {
        const auto out = CharDelete(text, severity, seed);
        std::size_t slots = 0;
        for (const auto& w : words) slots += CodePointLength(w) - 1;
        if (out.budget != floor_of(c)) fail("char_delete budget", text);
        if (out.applied != std::min(out.budget, slots)) fail("char_delete applied", text);
        if (Tokenize(out.text).size() != n) fail("char_delete word count", text);
        if (NonSpaceCodePoints(out.text) != c - out.applied) fail("char_delete count", text);
        break;
      }
      case OpType::kSynonymReplace: {
        const auto out = SynonymReplace(words, severity, seed, lexicon);
        std::size_t eligible = 0;
        for (const auto& w : words) {
          const std::string norm = NormalizeToken(w);
          eligible += !IsStopword(norm) && lexicon.Find(norm) != nullptr;
        }
        std::size_t changed = 0;
        for (std::size_t i = 0; i < n; ++i) changed += out.words[i] != words[i];
        if (out.budget != floor_of(n)) fail("synonym budget", text);
        if (out.applied != std::min(out.budget, eligible)) fail("synonym applied", text);
        if (changed != out.applied) fail("synonym changed", text);
        if (out.words.size() != n) fail("synonym word count", text);
        break;
      }
      case OpType::kWordDelete: {
        std::size_t content = 0;
        for (const auto& w : words) content += IsContentWord(w);
        if (content == 0) {
          try {
            WordDelete(words, severity, seed);
            fail("word_delete without content words did not refuse", text);
          } catch (const PreconditionError&) {
          }
          break;
        }
        const auto out = WordDelete(words, severity, seed);
        std::size_t kept_content = 0;
        for (const auto& w : out.words) kept_content += IsContentWord(w);
        const std::size_t expected = std::min(floor_of(n), n - 1);
        if (out.budget != floor_of(n)) fail("word_delete budget", text);
        if (out.applied != expected) fail("word_delete applied", text);
        if (out.words.size() != n - out.applied) fail("word_delete length", text);
        if (kept_content == 0) fail("word_delete removed every content word", text);
        // Survivors keep their relative order.
        std::size_t j = 0;
        for (std::size_t i = 0; i < n && j < out.words.size(); ++i) j += words[i] == out.words[j];
        if (j != out.words.size()) fail("word_delete order", text);
        break;
      }
      case OpType::kWordShuffle: {
        const auto out = WordShuffle(words, severity, seed);
        if (out.budget != floor_of(n)) fail("word_shuffle budget", text);
        if (out.applied != out.budget) fail("word_shuffle applied", text);
        if (Sorted(out.words) != Sorted(words)) fail("word_shuffle multiset", text);
        break;
      }
      case OpType::kBackTranslate:
        break;
    }
    ++exact_budget;
  }
  std::string per_op;
  for (const auto& [op, count] : checked) {
    per_op += (per_op.empty() ? "" : ", ") + op + " " + std::to_string(count);
  }
  return {failure.empty(), failure.empty()
                               ? std::to_string(exact_budget) + " draws (" + per_op + ")"
                               : failure};
}

// ---------------------------------------------------------------------------
// 5. Metrics equal a naive re-implementation.

struct Naive {
  static std::string Lower(std::string s) {
    for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
  }
  static bool Flip(const RunRecord& r) {
    return Lower(r.original_top1->token) != Lower(r.perturbed_top1->token);
  }
  static double Jaccard(const RunRecord& r) {
    std::set<std::string> a, b, both, either;
    for (std::size_t i = 0; i < r.original_topk_tokens.size() && i < 5; ++i) {
      a.insert(Lower(r.original_topk_tokens[i]));
    }
    for (std::size_t i = 0; i < r.perturbed_topk_tokens.size() && i < 5; ++i) {
      b.insert(Lower(r.perturbed_topk_tokens[i]));
    }
    for (const auto& x : a) {
      either.insert(x);
      if (b.count(x)) both.insert(x);
    }
    for (const auto& x : b) either.insert(x);
    if (either.empty()) return 1.0;
    return static_cast<double>(both.size()) / static_cast<double>(either.size());
  }
};

Outcome MetricOracles() {
  Rng rng(5);
  const std::vector<std::string> tokens = {"good", "Good", "film", "bad", "plot",
                                           "music", "x", "y", "z", "acting"};
  auto token = [&] { return tokens[rng.UniformIndex(tokens.size())]; };
  std::size_t sets = 0, compared = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t size = 1 + rng.UniformIndex(500);
    std::vector<RunRecord> records;
    for (std::size_t i = 0; i < size; ++i) {
      std::vector<std::string> a, b;
      for (std::size_t k = rng.UniformIndex(6); k > 0; --k) a.push_back(token());
      for (std::size_t k = rng.UniformIndex(6); k > 0; --k) b.push_back(token());
      RunRecord r = test::MakeRecord(token(), token(), rng.Bernoulli(0.5) ? "pos" : "neg",
                                     rng.Bernoulli(0.5) ? "pos" : "neg", a, b);
      if (rng.Bernoulli(0.1)) r.status = rng.Bernoulli(0.5) ? RecordStatus::kSkipped
                                                            : RecordStatus::kFailed;
      records.push_back(r);
    }
    double flips = 0, overlap = 0, consistent = 0, consistent_flips = 0, ok = 0;
    for (const auto& r : records) {
      if (r.status != RecordStatus::kOk) continue;
      ++ok;
      flips += Naive::Flip(r);
      overlap += Naive::Jaccard(r);
      if (r.original_pred->label == r.perturbed_pred->label) {
        ++consistent;
        consistent_flips += Naive::Flip(r);
      }
    }
    if (ok == 0) continue;
    ++sets;
    const bool same = FlipRate(records) == flips / ok &&
                      std::abs(MeanTopKOverlap(records) - overlap / ok) <= 1e-12 &&
                      PredictionConsistency(records) == consistent / ok;
    bool conditioned = true;
    if (consistent > 0) {
      conditioned = PredConsistentFlipRate(records).rate == consistent_flips / consistent;
    } else {
      try {
        PredConsistentFlipRate(records);
        conditioned = false;
      } catch (const UndefinedMetricError&) {
      }
    }
    for (const auto& r : records) {
      if (r.status != RecordStatus::kOk) continue;
      ++compared;
      if (Flipped(r) != Naive::Flip(r) || TopKOverlap(r) != Naive::Jaccard(r)) {
        return {false, "per-record mismatch in set " + std::to_string(trial)};
      }
    }
    if (!same || !conditioned) return {false, "aggregate mismatch in set " + std::to_string(trial)};
  }
  return {true, std::to_string(sets) + " record sets, " + std::to_string(compared) +
                    " ok records, four statistics identical"};
}

// ---------------------------------------------------------------------------
// 6. Bootstrap: degenerate CI on constant data; coverage of Bernoulli(0.3).

Outcome BootstrapBehaviour() {
  const auto start = Clock::now();
  BootstrapOptions opts;  // 10,000 iterations, 95%
  std::vector<RunRecord> constant(200, test::MakeRecord("a", "b"));
  const auto degenerate = PairedBootstrapCi(constant, Statistic::kFlipRate, opts);
  const bool degenerate_ok = degenerate.lower == 1.0 && degenerate.upper == 1.0;

  Rng rng(6);
  int covered = 0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    std::vector<unsigned char> flips(200);
    for (auto& f : flips) f = rng.Bernoulli(0.3);
    opts.seed = HashCombine(6, static_cast<std::uint64_t>(t));
    const auto ci = PairedBootstrapCi(
        flips.size(),
        [&](std::span<const std::size_t> sample) -> std::optional<double> {
          std::size_t sum = 0;
          for (std::size_t i : sample) sum += flips[i];
          return static_cast<double>(sum) / static_cast<double>(sample.size());
        },
        opts);
    covered += ci.lower <= 0.3 && 0.3 <= ci.upper;
  }
  const double coverage = static_cast<double>(covered) / trials;
  const double elapsed = Seconds(start);
  const bool pass = degenerate_ok && coverage >= 0.93 && coverage <= 0.97 && elapsed < 60.0;
  return {pass, Fmt("constant data CI = (%.1f, %.1f); coverage %.3f over 500 trials; %.1f s",
                    degenerate.lower, degenerate.upper, coverage, elapsed)};
}

// ---------------------------------------------------------------------------
// 7. A stable toy model has a lower FR than a brittle one on word operators.

Outcome QualitativeOrdering() {
  const fs::path dir = test::FreshDir("ac7");
  // Positive and negative cue words. The brittle model weighs them all
  // alike (exact and near ties, so the top word hinges on which cue comes
  // first and on the net sign); the stable model lets "superb" dominate.
  const std::vector<std::string> pos = {"fine", "neat", "lively", "warm", "bright", "sharp"};
  const std::vector<std::string> neg = {"flat", "slow", "stiff", "thin", "loud", "stale"};
  json brittle = json::object(), stable = json::object();
  brittle["superb"] = 1.0;
  stable["superb"] = 4.0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    brittle[pos[i]] = i % 3 == 2 ? 1.0 - 1.0 / 256 : 1.0;
    brittle[neg[i]] = i % 3 == 2 ? -1.0 + 1.0 / 256 : -1.0;
    stable[pos[i]] = 1.0 / 64;
    stable[neg[i]] = -1.0 / 64;
  }
  {
    std::ofstream lex(dir / "synonyms.tsv");
    lex << "superb\tsplendid\n";
    for (std::size_t i = 0; i < pos.size(); ++i) {
      lex << pos[i] << "\t" << pos[(i + 1) % pos.size()] << "\n";
      lex << neg[i] << "\t" << neg[(i + 1) % neg.size()] << "\n";
    }
  }
  // Each document holds k positive cues, k + 1 negative cues, "superb" and a
  // little filler, so the brittle model's logit sits within a few 1/256
  // steps of zero.
  Rng rng(7);
  {
    std::ofstream out(dir / "docs.jsonl");
    for (int i = 0; i < 200; ++i) {
      std::vector<std::string> words = {"superb"};
      const std::size_t k = 9 + rng.UniformIndex(3);
      for (std::size_t c = 0; c < k; ++c) words.push_back(pos[rng.UniformIndex(pos.size())]);
      for (std::size_t c = 0; c <= k; ++c) words.push_back(neg[rng.UniformIndex(neg.size())]);
      for (std::size_t f = 2 + rng.UniformIndex(2); f > 0; --f) {
        words.push_back(kFiller[rng.UniformIndex(kFiller.size())]);
      }
      rng.Shuffle(std::span<std::string>(words));
      out << json{{"id", "q" + std::to_string(i)}, {"text", Detokenize(words)}}.dump()
          << "\n";
    }
  }
  const json j = {
      {"global_seed", 77},
      {"dataset", {{"path", "docs.jsonl"}, {"name", "cues"}}},
      {"sample_size", 200},
      {"models",
       {{{"name", "brittle"}, {"kind", "builtin_toy"}, {"labels", {"pos", "neg"}},
         {"lexicon", brittle}},
        {{"name", "stable"}, {"kind", "builtin_toy"}, {"labels", {"pos", "neg"}},
         {"lexicon", stable}}}},
      {"perturbations", {{"ops", {"synonym_replace", "word_delete", "word_shuffle"}}}},
      {"lexicon_path", "synonyms.tsv"},
      {"output_dir", "run"}};
  const RunConfig config = ParseRunConfig(j, dir);
  ExecuteRun(config);
  const json report = json::parse(Slurp(dir / "run" / kReportFile));

  // Per-operator marginals over the 200 documents; per-cell results are
  // reported alongside.
  std::map<std::pair<std::string, std::string>, json> groups;
  for (const auto& g : report["groups"]) {
    const auto& key = g["key"];
    if (key["op_type"].is_null()) continue;
    const std::string id =
        key["op_type"].get<std::string>() +
        (key["severity"].is_null() ? "" : Fmt("@%.2f", key["severity"].get<double>()));
    groups[{key["model"].get<std::string>(), id}] = g;
  }
  auto separated = [&](const std::string& id) {
    const json& s = groups[{"stable", id}];
    const json& b = groups[{"brittle", id}];
    if (s.is_null() || b.is_null()) return false;
    return s["flip_rate"].get<double>() < b["flip_rate"].get<double>() &&
           s["flip_rate_ci"][1].get<double>() < b["flip_rate_ci"][0].get<double>();
  };
  bool pass = true;
  std::string detail;
  std::set<std::string> ops;
  for (const auto& cell : config.cells) ops.insert(std::string(OpTypeName(cell.op)));
  for (const auto& op : ops) {
    const json& s = groups[{"stable", op}];
    const json& b = groups[{"brittle", op}];
    if (s.is_null() || b.is_null()) return {false, "missing group " + op};
    const bool ok = separated(op);
    pass &= ok;
    detail += (detail.empty() ? "" : "; ") + op +
              Fmt(" %.3f [%.3f, %.3f] vs %.3f", s["flip_rate"].get<double>(),
                  s["flip_rate_ci"][0].get<double>(), s["flip_rate_ci"][1].get<double>(),
                  b["flip_rate"].get<double>()) +
              Fmt(" [%.3f, %.3f]", b["flip_rate_ci"][0].get<double>(),
                  b["flip_rate_ci"][1].get<double>()) +
              (ok ? "" : " (CIs overlap)");
  }
  std::size_t cells_separated = 0;
  std::string overlapping;
  for (const auto& cell : config.cells) {
    const std::string id = std::string(OpTypeName(cell.op)) + "@" + cell.severity.Label();
    if (separated(id)) {
      ++cells_separated;
    } else {
      overlapping += " " + id;
    }
  }
  detail += "; cells separated " + std::to_string(cells_separated) + "/" +
            std::to_string(config.cells.size()) +
            (overlapping.empty() ? "" : " (overlap:" + overlapping + ")");
  return {pass, "stable vs brittle FR, 200 documents: " + detail};
}

// ---------------------------------------------------------------------------
// 8. Identical runs and resumed runs give byte-identical outputs.

Outcome DeterminismAndResume() {
  const fs::path dir = test::FreshDir("ac8");
  Rng rng(8);
  const std::vector<std::string> content = {"good", "bad", "film", "plot", "great", "dull"};
  {
    std::ofstream out(dir / "docs.jsonl");
    for (int i = 0; i < 30; ++i) {
      std::vector<std::string> words;
      const std::size_t n = 4 + rng.UniformIndex(20);
      for (std::size_t k = 0; k < n; ++k) {
        words.push_back(rng.Bernoulli(0.5) ? content[rng.UniformIndex(content.size())]
                                           : kFiller[rng.UniformIndex(kFiller.size())]);
      }
      out << json{{"id", "r" + std::to_string(i)}, {"text", Detokenize(words)}}.dump() << "\n";
    }
  }
  json j = {
      {"global_seed", 8},
      {"dataset", {{"path", "docs.jsonl"}, {"name", "det"}}},
      {"sample_size", 25},
      {"models",
       {{{"name", "a"}, {"kind", "builtin_toy"}, {"labels", {"pos", "neg"}},
         {"lexicon", {{"good", 1.0}, {"bad", -1.0}, {"great", 2.0}, {"dull", -0.5}}}},
        {{"name", "b"}, {"kind", "builtin_toy"}, {"labels", {"pos", "neg"}},
         {"lexicon", {{"good", 0.3}, {"bad", -2.0}}}}}},
      {"explainer", {{"method", "surrogate"}, {"num_samples", 60}}},
      {"translator",
       {{"kind", "dictionary"}, {"en_de", {{"good", "gut"}}}, {"de_en", {{"gut", "fine"}}}}},
      {"bootstrap", {{"iterations", 2000}}},
      {"concurrency", 3}};
  auto run_in = [&](const std::string& name, std::optional<std::size_t> stop) {
    json k = j;
    k["output_dir"] = name;
    RunOptions options;
    options.stop_after_records = stop;
    return ExecuteRun(ParseRunConfig(k, dir), options);
  };
  auto canonical = [&](const std::string& name) {
    std::string out;
    for (const auto& r : CanonicalRecords(ReadRecords((dir / name / kRecordsFile).string()))) {
      out += SerializeRecord(r);
    }
    return out;
  };
  run_in("first", std::nullopt);
  run_in("second", std::nullopt);
  const RunSummary interrupted = run_in("resumed", 317);
  const RunSummary resumed = run_in("resumed", std::nullopt);
  const std::string report = Slurp(dir / "first" / kReportFile);
  const bool records_same = canonical("first") == canonical("second") &&
                            canonical("first") == canonical("resumed");
  const bool reports_same = report == Slurp(dir / "second" / kReportFile) &&
                            report == Slurp(dir / "resumed" / kReportFile);
  const bool pass = records_same && reports_same && interrupted.interrupted &&
                    interrupted.written + resumed.written == resumed.expected;
  return {pass, std::to_string(resumed.expected) + " records; interrupted after " +
                    std::to_string(interrupted.written) + ", resumed " +
                    std::to_string(resumed.written) + "; records " +
                    (records_same ? "identical" : "DIFFER") + ", reports " +
                    (reports_same ? "identical" : "DIFFER")};
}

// ---------------------------------------------------------------------------
// 9. Tier mapping of the three exemplar flip rates.

Outcome TierMapping() {
  const bool pass = AssignTier(0.083).tier == Tier::kRegulatory &&
                    AssignTier(0.149).tier == Tier::kBalanced &&
                    AssignTier(0.470).tier == Tier::kSpeedFirst;
  return {pass, std::string("0.083 -> ") + std::string(TierName(AssignTier(0.083).tier)) +
                    ", 0.149 -> " + std::string(TierName(AssignTier(0.149).tier)) +
                    ", 0.470 -> " + std::string(TierName(AssignTier(0.470).tier))};
}

// ---------------------------------------------------------------------------
// 10. Exhaustive uniform-kernel surrogate agrees with LOO on the top word.

Outcome SurrogateControl() {
  Rng rng(10);
  SurrogateParams params;
  params.exhaustive = true;
  params.kernel_width = SurrogateParams::kUniformKernel;
  std::size_t docs = 0;
  for (int lex = 0; lex < 200; ++lex) {
    const Lexicon lexicon = test::RandomLexicon(rng, 8, 3.0);
    auto model = test::ToyClient(lexicon);
    for (int d = 0; d < 5; ++d) {
      const std::size_t n = 1 + rng.UniformIndex(4);
      std::vector<std::string> words;
      for (std::size_t k : rng.SampleWithoutReplacement(lexicon.size(), n)) {
        words.push_back("w" + std::to_string(k));
      }
      const Document doc("d", Detokenize(words));
      const auto loo = ExplainLoo(*model, doc);
      const auto surrogate = ExplainSurrogate(*model, doc, params, 0);
      ++docs;
      if (ToLowerAscii(loo.explanation.top1_token()) !=
          ToLowerAscii(surrogate.explanation.top1_token())) {
        return {false, "lexicon " + std::to_string(lex) + ", \"" + doc.text() +
                           "\": loo " + loo.explanation.top1_token() + " vs surrogate " +
                           surrogate.explanation.top1_token()};
      }
    }
  }
  return {true, "200 lexicons, " + std::to_string(docs) + " documents with n <= 4"};
}

}  // namespace
}  // namespace xstab

int main() {
  using xstab::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"AC1 grid arithmetic", xstab::GridArithmetic},
      {"AC2 query budget", xstab::QueryBudget},
      {"AC3 LOO oracle", xstab::LooOracle},
      {"AC4 perturbation budgets", xstab::PerturbationBudgets},
      {"AC5 metric oracles", xstab::MetricOracles},
      {"AC6 bootstrap", xstab::BootstrapBehaviour},
      {"AC7 qualitative ordering", xstab::QualitativeOrdering},
      {"AC8 determinism and resume", xstab::DeterminismAndResume},
      {"AC9 tier mapping", xstab::TierMapping},
      {"AC10 surrogate control", xstab::SurrogateControl},
  };
  int failures = 0;
  for (const auto& [name, check] : checks) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failures += !outcome.pass;
    std::printf("%s %s: %s\n", outcome.pass ? "PASS" : "FAIL", name.c_str(),
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
