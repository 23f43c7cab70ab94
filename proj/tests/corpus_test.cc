// tests/corpus_test.cc
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

#include "cascade/corpus.h"

#include <sstream>

#include <gtest/gtest.h>

#include "cascade/errors.h"
#include "test_util.h"

namespace cascade {
namespace {

using testing::S;

TEST(ReadCorpusTest, SingleLine) {
  std::istringstream in("a b c\n");
  const auto corpus = ReadCorpus(in);
  ASSERT_EQ(corpus.size(), 1u);
  EXPECT_EQ(corpus[0], (Sentence{"a", "b", "c"}));
}

TEST(ReadCorpusTest, EmptyFile) {
  std::istringstream in("");
  EXPECT_TRUE(ReadCorpus(in).empty());
}

TEST(ReadCorpusTest, BlankLineIsEmptySentence) {
  std::istringstream in("x y\n\nz\n");
  CorpusReader reader(in, "fixture");
  Sentence s;
  std::vector<Sentence> got;
  while (reader.Next(&s)) got.push_back(s);
  ASSERT_EQ(got.size(), 3u);
  EXPECT_TRUE(got[1].empty());
  EXPECT_EQ(reader.lines_read(), 3u);
}

TEST(ReadCorpusTest, MissingFinalNewlineAndRuns) {
  std::istringstream in("  a \t b  \nc");
  const auto corpus = ReadCorpus(in);
  ASSERT_EQ(corpus.size(), 2u);
  EXPECT_EQ(corpus[0], (Sentence{"a", "b"}));
  EXPECT_EQ(corpus[1], (Sentence{"c"}));
}

TEST(ReadCorpusTest, InvalidUtf8ReportsLine) {
  std::istringstream in("ok\nbad \xff\xfe\n");
  try {
    ReadCorpus(in, "bad.txt");
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("bad.txt:2"), std::string::npos);
  }
}

TEST(ReadCorpusTest, NfcNormalizesBeforeComparison) {
  // "e" + combining acute accent vs precomposed U+00E9.
  std::istringstream in("caf\x65\xcc\x81 caf\xc3\xa9\n");
  const auto corpus = ReadCorpus(in);
  ASSERT_EQ(corpus[0].size(), 2u);
  EXPECT_EQ(corpus[0][0], corpus[0][1]);
}

TEST(ReadCorpusTest, VocabPolicyMapsUnknown) {
  Vocabulary v;
  v.Add("a");
  std::istringstream in("a b\n");
  const auto corpus = ReadCorpus(in, "s", VocabPolicy{&v});
  EXPECT_EQ(corpus[0], (Sentence{"a", "<unk>"}));
}

TEST(Utf8Test, LengthCountsCodePoints) {
  EXPECT_EQ(Utf8Length("abc"), 3u);
  EXPECT_EQ(Utf8Length("caf\xc3\xa9"), 4u);
  EXPECT_THROW(NormalizeUtf8("\xc3"), std::invalid_argument);
}

TEST(VocabularyTest, ReservedSymbolsFirst) {
  Vocabulary v;
  EXPECT_EQ(v.size(), 3u);
  EXPECT_EQ(v.Word(Vocabulary::kStartId), "<s>");
  EXPECT_EQ(v.Word(Vocabulary::kEndId), "</s>");
  EXPECT_EQ(v.Word(Vocabulary::kUnknownId), "<unk>");
  EXPECT_EQ(v.Find("zzz"), Vocabulary::kUnknownId);
  const WordId a = v.Add("a");
  EXPECT_EQ(a, 3);
  EXPECT_EQ(v.Add("a"), a);
  EXPECT_TRUE(v.Contains("a"));
}

TEST(BuildVocabularyTest, KeepsAllUnderCap) {
  const std::vector<Sentence> corpus{S("a a b")};
  const Vocabulary v = BuildVocabulary(corpus, 10);
  EXPECT_EQ(v.words(), (std::vector<std::string>{"<s>", "</s>", "<unk>", "a", "b"}));
}

TEST(BuildVocabularyTest, TieBrokenLexicographically) {
  const std::vector<Sentence> corpus{S("b b a a")};
  const Vocabulary v = BuildVocabulary(corpus, 4);
  EXPECT_EQ(v.size(), 4u);
  EXPECT_TRUE(v.Contains("a"));
  EXPECT_FALSE(v.Contains("b"));
}

TEST(BuildVocabularyTest, MinCountExcludes) {
  const std::vector<Sentence> corpus{S("a a b")};
  const Vocabulary v = BuildVocabulary(corpus, 10, 2);
  EXPECT_TRUE(v.Contains("a"));
  EXPECT_FALSE(v.Contains("b"));
  EXPECT_EQ(v.Find("b"), Vocabulary::kUnknownId);
}

TEST(BuildVocabularyTest, FrequencyOrderAndMarkersIgnored) {
  const std::vector<Sentence> corpus{S("c b b a a a <s> </s>")};
  const Vocabulary v = BuildVocabulary(corpus, 100);
  EXPECT_EQ(v.words(), (std::vector<std::string>{"<s>", "</s>", "<unk>", "a", "b", "c"}));
}

TEST(BuildVocabularyTest, RejectsTinyCap) {
  const std::vector<Sentence> corpus{S("a")};
  EXPECT_THROW(BuildVocabulary(corpus, 2), std::invalid_argument);
}

TEST(BuildVocabularyTest, DeterministicProperty) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto corpus = testing::RandomCorpus(rng, 200, 40, 8);
    const Vocabulary a = BuildVocabulary(corpus, 20);
    std::reverse(corpus.begin(), corpus.end());
    EXPECT_EQ(a, BuildVocabulary(corpus, 20));
  }
}

TEST(WriteCorpusTest, RoundTrip) {
  const std::vector<Sentence> corpus{S("a b"), {}, S("c")};
  std::ostringstream out;
  WriteCorpus(corpus, out);
  EXPECT_EQ(out.str(), "a b\n\nc\n");
  std::istringstream in(out.str());
  EXPECT_EQ(ReadCorpus(in), corpus);
}

TEST(ReadCorpusTest, MissingFileIsDataError) {
  EXPECT_THROW(ReadCorpus("/nonexistent/corpus.txt"), DataError);
}

}  // namespace
}  // namespace cascade
