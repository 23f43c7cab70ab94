// include/cascade/rescoring.h
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
// N-best rescoring with predicted translation quality, applied only to the
// least confident utterances.

#ifndef CASCADE_RESCORING_H_
#define CASCADE_RESCORING_H_

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cascade/nbest.h"
#include "cascade/qe.h"

namespace cascade {

struct RescoreConfig {
  double alpha = 0.5;          // weight of the normalized ASR total score
  double gate_quantile = 1.0;  // fraction of utterances eligible
  std::size_t depth = 10;      // hypotheses considered per list
  int threads = 1;
};

struct RescoreDecision {
  std::string utt_id;
  bool gated = false;
  double confidence = 0.0;  // rank-1 confidence
  int original_rank = 1;
  int chosen_rank = 1;
  std::vector<double> combined;  // empty when not gated
};

// alpha * minmax(asr totals) + (1 - alpha) * minmax(qe). A constant column
// normalizes to zeros. Throws std::invalid_argument on a size mismatch.
std::vector<double> CombineScores(const NBestList &list, std::span<const double> qe,
                                  double alpha);

// 1-based rank of the highest combined score; ties keep the better rank.
int BestRank(std::span<const double> combined);

// Marks the ceil(q * n) least confident utterances (ties in input order).
// The returned threshold is the largest gated confidence, or -inf when none
// is gated.
std::vector<bool> GateByConfidence(std::span<const double> confidences,
                                   double quantile, double *threshold = nullptr);

struct RescoreResult {
  std::vector<Transcript> output;
  std::vector<RescoreDecision> decisions;
  double threshold = 0.0;
};

// `qe[u][i]` is the predicted quality of hypothesis i of list u.
RescoreResult GateAndRescore(const std::vector<NBestList> &lists,
                             const std::vector<std::vector<double>> &qe,
                             const RescoreConfig &config);

// Predicted quality of the first `depth` hypotheses of every list, read from
// a feature table keyed by utt_id:rank. Throws DataError when a hypothesis
// has no feature row or the table lacks a model column.
std::vector<std::vector<double>> PredictQuality(const std::vector<NBestList> &lists,
                                                const GPModel &model,
                                                const FeatureTable &features,
                                                std::size_t depth, int threads = 1);

RescoreResult GateAndRescore(const std::vector<NBestList> &lists, const GPModel &model,
                             const FeatureTable &features, const RescoreConfig &config);

void WriteDecisions(const std::vector<RescoreDecision> &decisions, std::ostream &out);

struct TuningPoint {
  double alpha = 0.0;
  double gate_quantile = 0.0;
  double bleu = 0.0;
};

struct TuningResult {
  TuningPoint best;
  std::vector<TuningPoint> grid;  // alpha-major order
};

// Grid search over (alpha, gate_quantile) for corpus BLEU against
// `references` (keyed by utt_id). The first grid point wins ties.
TuningResult TuneRescoring(const std::vector<NBestList> &lists,
                           const std::vector<std::vector<double>> &qe,
                           const std::map<std::string, Sentence> &references,
                           std::span<const double> alphas, std::span<const double> quantiles,
                           const RescoreConfig &base = {});

using SentenceMetric =
    std::function<double(std::span<const std::string>, std::span<const std::string>)>;

// Per utterance, the hypothesis maximizing metric(reference, hypothesis);
// ties go to the lower rank. Throws StructuralError for a missing reference.
std::vector<int> OracleSelect(const std::vector<NBestList> &lists,
                              const std::map<std::string, Sentence> &references,
                              const SentenceMetric &metric);

}  // namespace cascade

#endif  // CASCADE_RESCORING_H_
