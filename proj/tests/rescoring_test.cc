// tests/rescoring_test.cc
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

#include "cascade/rescoring.h"

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "cascade/errors.h"
#include "cascade/metrics.h"
#include "test_util.h"

namespace cascade {
namespace {

using testing::S;

NBestList List(const std::string &id, std::vector<std::pair<double, std::string>> rows,
               double confidence = 0.5) {
  NBestList list;
  list.utt_id = id;
  int rank = 1;
  for (auto &[total, text] : rows) {
    Hypothesis h;
    h.utt_id = id;
    h.rank = rank++;
    h.total = total;
    h.confidence = confidence;
    h.tokens = S(text);
    list.hypotheses.push_back(h);
  }
  return list;
}

TEST(CombineScoresTest, HandArithmetic) {
  const NBestList list = List("u", {{-1, "a"}, {-3, "b"}});
  const std::vector<double> qe{0.2, 0.9};
  const auto c = CombineScores(list, qe, 0.4);
  EXPECT_DOUBLE_EQ(c[0], 0.4);
  EXPECT_DOUBLE_EQ(c[1], 0.6);
  EXPECT_EQ(BestRank(c), 2);
}

TEST(CombineScoresTest, DegenerateWeights) {
  const NBestList list = List("u", {{-1, "a"}, {-2, "b"}, {-5, "c"}});
  const std::vector<double> qe{0.1, 0.7, 0.3};
  EXPECT_EQ(BestRank(CombineScores(list, qe, 1.0)), 1);
  EXPECT_EQ(BestRank(CombineScores(list, qe, 0.0)), 2);
}

TEST(CombineScoresTest, ConstantColumnsAndTies) {
  const NBestList list = List("u", {{-2, "a"}, {-2, "b"}});
  const std::vector<double> qe{1.0, 1.0};
  const auto c = CombineScores(list, qe, 0.5);
  EXPECT_EQ(c, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(BestRank(c), 1);
}

TEST(CombineScoresTest, SizeMismatch) {
  const NBestList list = List("u", {{-1, "a"}, {-2, "b"}});
  const std::vector<double> qe{1.0};
  EXPECT_THROW(CombineScores(list, qe, 0.5), std::invalid_argument);
}

TEST(GateTest, QuantileCountsAndTies) {
  const std::vector<double> conf{0.9, 0.2, 0.5, 0.2, 0.7};
  double threshold = 0;
  EXPECT_EQ(GateByConfidence(conf, 0.0, &threshold), std::vector<bool>(5, false));
  EXPECT_EQ(threshold, -std::numeric_limits<double>::infinity());
  EXPECT_EQ(GateByConfidence(conf, 1.0), std::vector<bool>(5, true));
  // ceil(0.2 * 5) = 1: the first of the tied 0.2s.
  EXPECT_EQ(GateByConfidence(conf, 0.2, &threshold),
            (std::vector<bool>{false, true, false, false, false}));
  EXPECT_EQ(threshold, 0.2);
  EXPECT_EQ(GateByConfidence(conf, 0.55, &threshold),
            (std::vector<bool>{false, true, true, true, false}));
  EXPECT_EQ(threshold, 0.5);
}

// Property: raising the quantile only adds utterances to the gated set.
TEST(GatePropertyTest, Monotone) {
  std::mt19937_64 rng(111);
  std::uniform_int_distribution<int> level(0, 5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> conf(37);
    for (double &c : conf) c = level(rng) / 5.0;
    std::vector<bool> prev(conf.size(), false);
    for (int step = 0; step <= 20; ++step) {
      const auto gated = GateByConfidence(conf, step / 20.0);
      for (std::size_t i = 0; i < conf.size(); ++i) {
        if (prev[i]) {
          ASSERT_TRUE(gated[i]);
        }
      }
      prev = gated;
    }
  }
}

struct Data {
  std::vector<NBestList> lists;
  std::vector<std::vector<double>> qe;
};

Data RandomData(std::mt19937_64 &rng, int utterances) {
  Data d;
  std::uniform_real_distribution<double> u;
  for (int i = 0; i < utterances; ++i) {
    std::vector<std::pair<double, std::string>> rows;
    double total = -u(rng);
    const auto texts = testing::RandomCorpus(rng, 4, 6, 5);
    std::vector<double> qe;
    for (const auto &t : texts) {
      rows.emplace_back(total, Join(t));
      total -= u(rng);
      qe.push_back(u(rng));
    }
    d.lists.push_back(List("u" + std::to_string(i), rows, u(rng)));
    d.qe.push_back(qe);
  }
  return d;
}

void ExpectBaseline(const Data &d, const RescoreResult &r) {
  for (std::size_t i = 0; i < d.lists.size(); ++i) {
    EXPECT_EQ(r.output[i].utt_id, d.lists[i].utt_id);
    EXPECT_EQ(r.output[i].tokens, d.lists[i].best().tokens);
    EXPECT_EQ(r.decisions[i].chosen_rank, 1);
  }
}

TEST(GateAndRescoreTest, IdentityLimits) {
  std::mt19937_64 rng(112);
  const Data d = RandomData(rng, 40);
  RescoreConfig closed;
  closed.gate_quantile = 0.0;
  closed.alpha = 0.0;
  const auto r0 = GateAndRescore(d.lists, d.qe, closed);
  ExpectBaseline(d, r0);
  for (const auto &dec : r0.decisions) {
    EXPECT_FALSE(dec.gated);
    EXPECT_TRUE(dec.combined.empty());
  }
  RescoreConfig asr_only;
  asr_only.alpha = 1.0;
  ExpectBaseline(d, GateAndRescore(d.lists, d.qe, asr_only));
}

TEST(GateAndRescoreTest, OpenGateFollowsQe) {
  std::mt19937_64 rng(113);
  const Data d = RandomData(rng, 30);
  RescoreConfig open;
  open.alpha = 0.0;
  open.threads = 3;
  const auto r = GateAndRescore(d.lists, d.qe, open);
  for (std::size_t i = 0; i < d.lists.size(); ++i) {
    EXPECT_TRUE(r.decisions[i].gated);
    const auto best = std::max_element(d.qe[i].begin(), d.qe[i].end()) - d.qe[i].begin();
    EXPECT_EQ(r.decisions[i].chosen_rank, best + 1);
    EXPECT_EQ(r.output[i].tokens, d.lists[i].hypotheses[best].tokens);
  }
}

TEST(GateAndRescoreTest, DepthLimitsCandidates) {
  const std::vector<NBestList> lists{List("u", {{-1, "a"}, {-2, "b"}, {-3, "c"}})};
  const std::vector<std::vector<double>> qe{{0.0, 0.1, 1.0}};
  RescoreConfig c;
  c.alpha = 0.0;
  c.depth = 2;
  EXPECT_EQ(GateAndRescore(lists, qe, c).decisions[0].chosen_rank, 2);
}

TEST(GateAndRescoreTest, DecisionLogFormat) {
  const std::vector<NBestList> lists{List("u1", {{-1, "a"}, {-2, "b"}}, 0.25),
                                     List("u2", {{-1, "c"}}, 0.75)};
  const std::vector<std::vector<double>> qe{{0.0, 1.0}, {0.5}};
  RescoreConfig c;
  c.alpha = 0.0;
  c.gate_quantile = 0.5;
  std::ostringstream out;
  WriteDecisions(GateAndRescore(lists, qe, c).decisions, out);
  EXPECT_EQ(out.str(),
            "utt_id\tgated\tconfidence\tchosen_rank\nu1\t1\t0.25\t2\nu2\t0\t0.75\t1\n");
}

TEST(GateAndRescoreTest, DeterministicAcrossRunsAndThreads) {
  std::mt19937_64 rng(114);
  const Data d = RandomData(rng, 50);
  RescoreConfig a, b;
  a.gate_quantile = b.gate_quantile = 0.55;
  b.threads = 4;
  std::ostringstream x, y;
  WriteTranscripts(GateAndRescore(d.lists, d.qe, a).output, x);
  WriteTranscripts(GateAndRescore(d.lists, d.qe, b).output, y);
  EXPECT_EQ(x.str(), y.str());
}

TEST(PredictQualityTest, MissingFeatureRow) {
  const std::vector<NBestList> lists{List("u1", {{-1, "a"}, {-2, "b"}})};
  Eigen::MatrixXd x(4, 1);
  x << 0, 1, 2, 3;
  Eigen::VectorXd y(4);
  y << 0, 1, 2, 3;
  const GPModel model = GPModel::Train(x, y, {"f"});
  FeatureTable table;
  table.names = {"f"};
  table.keys = {"u1:1"};
  table.values = Eigen::MatrixXd::Zero(1, 1);
  try {
    PredictQuality(lists, model, table, 10);
    FAIL();
  } catch (const DataError &e) {
    EXPECT_NE(std::string(e.what()).find("u1:2"), std::string::npos);
  }
  table.names = {"g"};
  table.keys = {"u1:1", "u1:2"};
  table.values = Eigen::MatrixXd::Zero(2, 1);
  EXPECT_THROW(PredictQuality(lists, model, table, 10), DataError);
}

TEST(OracleSelectTest, PicksBestAndTiesToLowerRank) {
  const std::vector<NBestList> lists{List("u1", {{-1, "a b c d"}, {-2, "a b c d"}}),
                                     List("u2", {{-1, "x y"}, {-2, "p q r s"}, {-3, "p q r s"}})};
  const std::map<std::string, Sentence> refs{{"u1", S("a b c d")}, {"u2", S("p q r s")}};
  const auto metric = [](std::span<const std::string> r, std::span<const std::string> h) {
    return SentenceBleu(r, h);
  };
  EXPECT_EQ(OracleSelect(lists, refs, metric), (std::vector<int>{1, 2}));
  const std::map<std::string, Sentence> partial{{"u1", S("a")}};
  EXPECT_THROW(OracleSelect(lists, partial, metric), StructuralError);
}

// Property: the oracle corpus BLEU is never below the 1-best corpus BLEU.
TEST(OracleSelectPropertyTest, NeverBelowBaseline) {
  std::mt19937_64 rng(115);
  const auto metric = [](std::span<const std::string> r, std::span<const std::string> h) {
    return SentenceBleu(r, h);
  };
  for (int trial = 0; trial < 20; ++trial) {
    const Data d = RandomData(rng, 30);
    std::map<std::string, Sentence> refs;
    std::vector<Sentence> ref_list, base, best;
    for (const auto &l : d.lists) {
      refs[l.utt_id] = l.hypotheses[1].tokens;
      ref_list.push_back(l.hypotheses[1].tokens);
    }
    const auto ranks = OracleSelect(d.lists, refs, metric);
    for (std::size_t i = 0; i < d.lists.size(); ++i) {
      base.push_back(d.lists[i].best().tokens);
      best.push_back(d.lists[i].hypotheses[ranks[i] - 1].tokens);
    }
    EXPECT_GE(Bleu(ref_list, best).bleu, Bleu(ref_list, base).bleu);
  }
}

TEST(TuneRescoringTest, FindsHelpfulSetting) {
  // Rank 2 is the reference for the low-confidence utterance only.
  const std::vector<NBestList> lists{
      List("u1", {{-1, "a b c d e"}, {-2, "a b x d e"}}, 0.9),
      List("u2", {{-1, "f g x i j"}, {-2, "f g h i j"}}, 0.1)};
  const std::vector<std::vector<double>> qe{{0.0, 1.0}, {0.0, 1.0}};
  const std::map<std::string, Sentence> refs{{"u1", S("a b c d e")}, {"u2", S("f g h i j")}};
  const std::vector<double> alphas{1.0, 0.0}, quantiles{0.0, 0.5, 1.0};
  const TuningResult r = TuneRescoring(lists, qe, refs, alphas, quantiles);
  EXPECT_EQ(r.grid.size(), 6u);
  EXPECT_EQ(r.best.alpha, 0.0);
  EXPECT_EQ(r.best.gate_quantile, 0.5);
  EXPECT_EQ(r.best.bleu, 100.0);
  EXPECT_EQ(r.grid[0].alpha, 1.0);
  EXPECT_EQ(r.grid[1].gate_quantile, 0.5);
  const std::map<std::string, Sentence> partial{{"u1", S("a")}};
  EXPECT_THROW(TuneRescoring(lists, qe, partial, alphas, quantiles), StructuralError);
}

}  // namespace
}  // namespace cascade
