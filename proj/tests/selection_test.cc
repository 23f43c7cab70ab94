// tests/selection_test.cc
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Copyright 2026 The Cascade Authors.
//

#include "cascade/selection.h"

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "cascade/arpa.h"
#include "cascade/errors.h"
#include "test_util.h"

namespace cascade {
namespace {

using testing::S;

NGramModel Unigram(double a, double b, double end) {
  std::ostringstream text;
  text << "\\data\\\nngram 1=4\n\n\\1-grams:\n-99\t<s>\n" << std::log10(end) << "\t</s>\n"
       << std::log10(a) << "\ta\n" << std::log10(b) << "\tb\n\n\\end\\\n";
  std::istringstream in(text.str());
  return ReadArpa(in);
}

std::vector<ScoredSentence> WithCed(const std::vector<double> &ceds) {
  std::vector<ScoredSentence> out;
  for (std::size_t i = 0; i < ceds.size(); ++i) out.push_back({i, ceds[i], 0.0, ceds[i]});
  return out;
}

TEST(ScoreCedTest, IdenticalModelsGiveZero) {
  std::mt19937_64 rng(61);
  const auto corpus = testing::RandomCorpus(rng, 50, 10, 6);
  const NGramModel m = TrainMkn(corpus, 2, BuildVocabulary(corpus));
  for (const auto &s : ScoreCed(m, m, corpus)) EXPECT_EQ(s.ced, 0.0);
}

TEST(ScoreCedTest, HandUnigramValue) {
  // p_id(a) = 0.4, p_ood(a) = 0.1, both p(</s>) = 0.5: the </s> terms cancel
  // and CED("a") = (log2 0.1 - log2 0.4) / 2 = -1 bit/word.
  const NGramModel id = Unigram(0.4, 0.1, 0.5), ood = Unigram(0.1, 0.4, 0.5);
  const std::vector<Sentence> corpus{S("a")};
  const auto scored = ScoreCed(id, ood, corpus);
  EXPECT_NEAR(scored[0].ced, -1.0, 1e-7);  // ARPA stores 9 digits
  EXPECT_NEAR(scored[0].h_id, -(std::log2(0.4) + std::log2(0.5)) / 2, 1e-7);
  EXPECT_EQ(scored[0].ced, scored[0].h_id - scored[0].h_ood);
}

// Property: swapping the models negates every CED exactly.
TEST(ScoreCedPropertyTest, Antisymmetry) {
  std::mt19937_64 rng(62);
  const auto a = testing::RandomCorpus(rng, 100, 12, 7);
  const auto b = testing::RandomCorpus(rng, 100, 18, 7);
  std::vector<Sentence> both = a;
  both.insert(both.end(), b.begin(), b.end());
  const Vocabulary v = BuildVocabulary(both);
  const NGramModel ma = TrainMkn(a, 3, v), mb = TrainMkn(b, 3, v);
  const auto fwd = ScoreCed(ma, mb, both, 2), back = ScoreCed(mb, ma, both, 1);
  for (std::size_t i = 0; i < both.size(); ++i) EXPECT_EQ(fwd[i].ced, -back[i].ced);
}

TEST(SelectFractionTest, HandSort) {
  const auto report = SelectFraction(WithCed({2, -1, 5, 0}), 0.5);
  const auto chosen = report.selected();
  EXPECT_EQ(std::vector<std::size_t>(chosen.begin(), chosen.end()),
            (std::vector<std::size_t>{1, 3}));
}

TEST(SelectFractionTest, FullFractionSortedAndStable) {
  const auto report = SelectFraction(WithCed({1, 0, 1, 0}), 1.0);
  EXPECT_EQ(report.chosen, 4u);
  EXPECT_EQ(report.ranking, (std::vector<std::size_t>{1, 3, 0, 2}));
}

TEST(SelectFractionTest, CeilingAndEmpty) {
  EXPECT_EQ(SelectFraction(WithCed({1, 2, 3}), 0.5).chosen, 2u);
  EXPECT_EQ(SelectFraction(WithCed({1, 2, 3, 4}), 0.25).chosen, 1u);
  EXPECT_EQ(SelectFraction(WithCed({}), 0.5).chosen, 0u);
  EXPECT_THROW(SelectFraction(WithCed({1}), 0.0), std::invalid_argument);
  EXPECT_THROW(SelectFraction(WithCed({1}), 1.5), std::invalid_argument);
}

// In-domain sentences use words "i*", noise sentences words "n*".
struct Mixed {
  std::vector<Sentence> corpus, in_domain, dev;
  std::size_t clean = 0;
};

Mixed MakeMixed(std::mt19937_64 &rng, std::size_t clean, std::size_t noise) {
  Mixed m;
  m.corpus = testing::RandomCorpus(rng, clean, 30, 10, "i");
  for (auto &s : m.corpus) {
    if (s.empty()) s.push_back("i0");
  }
  auto n = testing::RandomCorpus(rng, noise, 30, 10, "n");
  for (auto &s : n) {
    if (s.empty()) s.push_back("n0");
  }
  m.corpus.insert(m.corpus.end(), n.begin(), n.end());
  m.in_domain = testing::RandomCorpus(rng, 300, 30, 10, "i");
  m.dev = testing::RandomCorpus(rng, 200, 30, 10, "i");
  m.clean = clean;
  return m;
}

TEST(SelectionTest, EnrichmentOnMixedCorpus) {
  std::mt19937_64 rng(63);
  const Mixed m = MakeMixed(rng, 400, 400);
  std::vector<Sentence> all = m.in_domain;
  all.insert(all.end(), m.corpus.begin(), m.corpus.end());
  const Vocabulary v = BuildVocabulary(all);
  const auto scored = ScoreCed(TrainMkn(m.in_domain, 3, v), TrainMkn(m.corpus, 3, v), m.corpus);
  const auto report = SelectFraction(scored, 0.25);
  std::size_t clean = 0;
  for (std::size_t i : report.selected()) clean += i < m.clean;
  EXPECT_GT(static_cast<double>(clean) / report.chosen, 0.9);
}

TEST(LineSearchTest, SingleCandidateReturned) {
  std::mt19937_64 rng(64);
  const Mixed m = MakeMixed(rng, 50, 50);
  const std::vector<double> ceds(m.corpus.size(), 0.0);
  const std::vector<std::size_t> grid{30};
  const auto report = LineSearchBatch(WithCed(ceds), m.corpus, m.dev, grid);
  EXPECT_EQ(report.chosen, 30u);
  ASSERT_EQ(report.grid_values.size(), 1u);
  EXPECT_TRUE(std::isfinite(report.grid_values[0]));
}

TEST(LineSearchTest, OptimumExcludesNoiseTail) {
  std::mt19937_64 rng(65);
  const Mixed m = MakeMixed(rng, 500, 500);
  std::vector<Sentence> all = m.in_domain;
  all.insert(all.end(), m.corpus.begin(), m.corpus.end());
  const Vocabulary v = BuildVocabulary(all);
  const auto scored = ScoreCed(TrainMkn(m.in_domain, 3, v), TrainMkn(m.corpus, 3, v), m.corpus);
  const std::vector<std::size_t> grid{25, 100, 300, 500, 700, 1000};
  const auto report = LineSearchBatch(scored, m.corpus, m.dev, grid);
  EXPECT_LE(report.chosen, 600u);
  const auto &vals = report.grid_values;
  const auto best = std::min_element(vals.begin(), vals.end()) - vals.begin();
  EXPECT_GT(best, 0);
  EXPECT_LT(best, static_cast<long>(vals.size()) - 1);
}

TEST(LineSearchTest, Errors) {
  const std::vector<Sentence> corpus{S("a"), S("b")};
  const auto scored = WithCed({0, 1});
  const std::vector<std::size_t> bad{2, 1}, ok{1};
  EXPECT_THROW(LineSearchBatch(scored, corpus, corpus, bad), std::invalid_argument);
  EXPECT_THROW(LineSearchBatch(scored, corpus, std::vector<Sentence>{}, ok),
               std::invalid_argument);
}

TEST(ExtractParallelTest, Indexing) {
  SelectionReport r;
  r.corpus_size = 3;
  r.ranking = {2, 0, 1};
  r.chosen = 2;
  const std::vector<std::string> target{"x", "y", "z"};
  EXPECT_EQ(ExtractParallel(r, target), (std::vector<std::string>{"z", "x"}));
  r.chosen = 3;
  auto all = ExtractParallel(r, target);
  std::sort(all.begin(), all.end());
  EXPECT_EQ(all, target);
  const std::vector<std::string> short_target{"x"};
  EXPECT_THROW(ExtractParallel(r, short_target), StructuralError);
}

TEST(ExtractParallelTest, IdentityTargetReproducesSource) {
  const std::vector<std::string> lines{"a b", "c", "d e f"};
  const auto report = SelectFraction(WithCed({3, 1, 2}), 0.66);
  const auto got = ExtractParallel(report, lines);
  EXPECT_EQ(got, (std::vector<std::string>{"c", "d e f"}));
}

}  // namespace
}  // namespace cascade
