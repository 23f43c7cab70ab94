// tests/qe_test.cc
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

#include <sstream>

#include <gtest/gtest.h>

#include "cascade/arpa.h"
#include "cascade/errors.h"
#include "cascade/qe.h"
#include "test_util.h"

namespace cascade {
namespace {

using testing::S;

Eigen::Index Column(const std::string &name) {
  const auto &names = QeFeatureNames();
  return std::find(names.begin(), names.end(), name) - names.begin();
}

// Uniform unigram LM over ten predictable events (nine words and </s>).
NGramModel UniformTen() {
  std::ostringstream text;
  text << "\\data\\\nngram 1=11\n\n\\1-grams:\n-99\t<s>\n-1\t</s>\n";
  for (char c = 'a'; c < 'j'; ++c) text << "-1\t" << c << "\n";
  text << "\n\\end\\\n";
  std::istringstream in(text.str());
  return ReadArpa(in);
}

struct Fixture {
  std::vector<Sentence> train{S("a b c"), S("a b"), S("a d e"), S("a")};
  Vocabulary vocab = BuildVocabulary(train);
  CountTable counts = CountNGrams(train, 3, vocab);
  NGramModel lm = UniformTen();
};

Hypothesis Hyp(const std::string &text, int rank = 1, double total = -10) {
  Hypothesis h;
  h.utt_id = "u";
  h.rank = rank;
  h.acoustic = 2 * total;
  h.lm = -4;
  h.total = total;
  h.confidence = 0.8;
  h.tokens = S(text);
  return h;
}

TEST(FeatureExtractorTest, TokenCountAndLength) {
  Fixture fx;
  const FeatureExtractor ex(fx.lm, fx.counts);
  const Eigen::VectorXd f = ex.Extract(Hyp("a bb ccc"), -10);
  EXPECT_EQ(f.size(), static_cast<Eigen::Index>(QeFeatureNames().size()));
  EXPECT_EQ(f(Column("token_count")), 3.0);
  EXPECT_EQ(f(Column("mean_token_length")), 2.0);
}

TEST(FeatureExtractorTest, UniformLmPerWord) {
  Fixture fx;
  const FeatureExtractor ex(fx.lm, fx.counts);
  const Eigen::VectorXd f = ex.Extract(Hyp("a b c"), -10);
  EXPECT_NEAR(f(Column("lm_log10_prob_per_word")), -1.0, 1e-12);
  EXPECT_NEAR(f(Column("lm_log10_prob")), -4.0, 1e-12);
  EXPECT_NEAR(f(Column("lm_perplexity")), 10.0, 1e-9);
}

TEST(FeatureExtractorTest, OovFraction) {
  Fixture fx;
  const std::vector<Sentence> one{S("a")};
  const NGramModel lm = TrainMkn(one, 1, BuildVocabulary(one));
  const FeatureExtractor ex(lm, fx.counts);
  EXPECT_EQ(ex.Extract(Hyp("a qqq"), -10)(Column("oov_fraction")), 0.5);
}

TEST(FeatureExtractorTest, SeenNGramsAndSurfaceClasses) {
  Fixture fx;
  const FeatureExtractor ex(fx.lm, fx.counts);
  const Eigen::VectorXd f = ex.Extract(Hyp("a b c , 42"), -10);
  EXPECT_DOUBLE_EQ(f(Column("bigram_seen_fraction")), 2.0 / 4);
  EXPECT_DOUBLE_EQ(f(Column("trigram_seen_fraction")), 1.0 / 3);
  EXPECT_DOUBLE_EQ(f(Column("punctuation_fraction")), 0.2);
  EXPECT_DOUBLE_EQ(f(Column("numeric_fraction")), 0.2);
  EXPECT_DOUBLE_EQ(f(Column("type_token_ratio")), 1.0);
  double quartiles = 0;
  for (int q = 1; q <= 4; ++q) {
    quartiles += f(Column("freq_quartile" + std::to_string(q) + "_fraction"));
  }
  EXPECT_DOUBLE_EQ(quartiles, 3.0 / 5);  // a, b, c are training words
  EXPECT_DOUBLE_EQ(f(Column("freq_quartile4_fraction")), 0.2);  // "a" is most frequent
}

TEST(FeatureExtractorTest, AsrFeatures) {
  Fixture fx;
  const FeatureExtractor ex(fx.lm, fx.counts);
  const Eigen::VectorXd f = ex.Extract(Hyp("a b", 3, -12), -10);
  EXPECT_EQ(f(Column("asr_total_per_word")), -6.0);
  EXPECT_EQ(f(Column("asr_acoustic_per_word")), -12.0);
  EXPECT_EQ(f(Column("asr_lm_per_word")), -2.0);
  EXPECT_EQ(f(Column("asr_confidence")), 0.8);
  EXPECT_EQ(f(Column("nbest_rank")), 3.0);
  EXPECT_EQ(f(Column("score_margin_to_best")), 2.0);
}

TEST(FeatureExtractorTest, EmptyHypothesisIsFinite) {
  Fixture fx;
  const FeatureExtractor ex(fx.lm, fx.counts);
  const Eigen::VectorXd f = ex.Extract(Hyp(""), -10);
  EXPECT_TRUE(f.allFinite());
  EXPECT_EQ(f(Column("token_count")), 0.0);
  EXPECT_NEAR(f(Column("lm_log10_prob")), -1.0, 1e-12);
}

TEST(FeatureTableTest, RoundTripAndLookup) {
  FeatureTable t;
  t.names = {"x", "y"};
  t.keys = {FeatureKey("u1", 1), FeatureKey("u1", 2)};
  t.values.resize(2, 2);
  t.values << 0.1, -3e-17, 1e300, 42;
  std::stringstream buf;
  WriteFeatureTable(t, buf);
  EXPECT_EQ(buf.str().substr(0, 8), "key\tx\ty\n");
  const FeatureTable back = ReadFeatureTable(buf, "mem");
  EXPECT_EQ(back.names, t.names);
  EXPECT_EQ(back.keys, t.keys);
  EXPECT_EQ(back.values, t.values);
  EXPECT_EQ(back.Find("u1:2"), 1);
  EXPECT_EQ(back.Find("u9:1"), -1);
  const FeatureTable y = back.SelectColumns({1});
  EXPECT_EQ(y.names, std::vector<std::string>{"y"});
  EXPECT_EQ(y.values(1, 0), 42.0);
}

TEST(FeatureTableTest, RaggedAndNonFiniteRowsRejected) {
  std::istringstream ragged("key\tx\ty\nu:1\t1\n");
  try {
    ReadFeatureTable(ragged, "f.tsv");
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream nan("key\tx\nu:1\tnan\n");
  EXPECT_THROW(ReadFeatureTable(nan, "f.tsv"), ParseError);
}

}  // namespace
}  // namespace cascade
