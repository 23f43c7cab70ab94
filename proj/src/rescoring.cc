// src/rescoring.cc
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
// Score combination, confidence gating and oracle selection.

#include "cascade/rescoring.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "cascade/errors.h"
#include "cascade/metrics.h"
#include "cascade/parallel.h"

namespace cascade {
namespace {

std::vector<double> MinMax(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  std::vector<double> out(v.size(), 0.0);
  if (v.empty() || !(*hi > *lo)) return out;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - *lo) / (*hi - *lo);
  return out;
}

}  // namespace

std::vector<double> CombineScores(const NBestList &list, std::span<const double> qe,
                                  double alpha) {
  if (qe.size() != list.size()) {
    throw std::invalid_argument("utterance " + list.utt_id + ": " +
                                std::to_string(qe.size()) + " predictions for " +
                                std::to_string(list.size()) + " hypotheses");
  }
  std::vector<double> asr(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) asr[i] = list.hypotheses[i].total;
  const auto asr_norm = MinMax(asr);
  const auto qe_norm = MinMax(qe);
  std::vector<double> combined(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    combined[i] = alpha * asr_norm[i] + (1.0 - alpha) * qe_norm[i];
  }
  return combined;
}

int BestRank(std::span<const double> combined) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < combined.size(); ++i) {
    if (combined[i] > combined[best]) best = i;
  }
  return static_cast<int>(best) + 1;
}

std::vector<bool> GateByConfidence(std::span<const double> confidences, double quantile,
                                   double *threshold) {
  if (!(quantile >= 0.0 && quantile <= 1.0)) {
    throw std::invalid_argument("gate quantile must be in [0, 1]");
  }
  std::vector<std::size_t> order(confidences.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return confidences[a] < confidences[b];
  });
  const double want = std::ceil(quantile * static_cast<double>(confidences.size()) - 1e-9);
  const auto count = std::min(confidences.size(),
                              static_cast<std::size_t>(std::max(0.0, want)));
  std::vector<bool> gated(confidences.size(), false);
  for (std::size_t i = 0; i < count; ++i) gated[order[i]] = true;
  if (threshold != nullptr) {
    *threshold = count == 0 ? -std::numeric_limits<double>::infinity()
                            : confidences[order[count - 1]];
  }
  return gated;
}

RescoreResult GateAndRescore(const std::vector<NBestList> &lists,
                             const std::vector<std::vector<double>> &qe,
                             const RescoreConfig &config) {
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) {
    throw std::invalid_argument("alpha must be in [0, 1]");
  }
  if (qe.size() != lists.size()) throw std::invalid_argument("one prediction list per utterance");
  if (config.depth < 1) throw std::invalid_argument("depth must be >= 1");
  std::vector<double> confidences;
  confidences.reserve(lists.size());
  for (const auto &l : lists) confidences.push_back(l.best().confidence);

  RescoreResult result;
  const auto gated = GateByConfidence(confidences, config.gate_quantile, &result.threshold);
  result.output.resize(lists.size());
  result.decisions.resize(lists.size());
  ParallelFor(lists.size(), config.threads, [&](std::size_t u) {
    const NBestList &full = lists[u];
    RescoreDecision &d = result.decisions[u];
    d.utt_id = full.utt_id;
    d.gated = gated[u];
    d.confidence = confidences[u];
    if (d.gated) {
      const std::size_t depth = std::min(config.depth, full.size());
      NBestList list{full.utt_id, {full.hypotheses.begin(), full.hypotheses.begin() + depth}};
      d.combined = CombineScores(
          list, std::span<const double>(qe[u]).first(std::min(depth, qe[u].size())),
          config.alpha);
      d.chosen_rank = BestRank(d.combined);
    }
    const Hypothesis &chosen = full.hypotheses[static_cast<std::size_t>(d.chosen_rank - 1)];
    result.output[u] = Transcript{full.utt_id, chosen.tokens, {}};
  });
  return result;
}

std::vector<std::vector<double>> PredictQuality(const std::vector<NBestList> &lists,
                                                const GPModel &model,
                                                const FeatureTable &features,
                                                std::size_t depth, int threads) {
  std::unordered_map<std::string, Eigen::Index> rows;
  for (std::size_t r = 0; r < features.keys.size(); ++r) {
    rows.emplace(features.keys[r], static_cast<Eigen::Index>(r));
  }
  // Model columns by name, so feature files may carry extra columns.
  std::vector<Eigen::Index> columns;
  for (const auto &name : model.feature_names()) {
    auto it = std::find(features.names.begin(), features.names.end(), name);
    if (it == features.names.end()) throw DataError("feature table lacks column " + name);
    columns.push_back(static_cast<Eigen::Index>(it - features.names.begin()));
  }
  std::vector<Eigen::Index> needed;
  for (const auto &l : lists) {
    for (std::size_t i = 0; i < std::min(depth, l.size()); ++i) {
      const auto key = FeatureKey(l.utt_id, l.hypotheses[i].rank);
      auto it = rows.find(key);
      if (it == rows.end()) throw DataError("no feature row for " + key);
      needed.push_back(it->second);
    }
  }
  const Eigen::MatrixXd pred = model.PredictBatch(features.values(needed, columns), threads);
  std::vector<std::vector<double>> qe(lists.size());
  Eigen::Index r = 0;
  for (std::size_t u = 0; u < lists.size(); ++u) {
    for (std::size_t i = 0; i < std::min(depth, lists[u].size()); ++i) qe[u].push_back(pred(r++, 0));
  }
  return qe;
}

RescoreResult GateAndRescore(const std::vector<NBestList> &lists, const GPModel &model,
                             const FeatureTable &features, const RescoreConfig &config) {
  return GateAndRescore(lists, PredictQuality(lists, model, features, config.depth, config.threads),
                        config);
}

void WriteDecisions(const std::vector<RescoreDecision> &decisions, std::ostream &out) {
  out << "utt_id\tgated\tconfidence\tchosen_rank\n";
  for (const auto &d : decisions) {
    out << d.utt_id << '\t' << (d.gated ? 1 : 0) << '\t' << FormatDouble(d.confidence)
        << '\t' << d.chosen_rank << '\n';
  }
}

TuningResult TuneRescoring(const std::vector<NBestList> &lists,
                           const std::vector<std::vector<double>> &qe,
                           const std::map<std::string, Sentence> &references,
                           std::span<const double> alphas, std::span<const double> quantiles,
                           const RescoreConfig &base) {
  if (alphas.empty() || quantiles.empty()) throw std::invalid_argument("empty tuning grid");
  std::vector<Sentence> refs;
  refs.reserve(lists.size());
  for (const auto &l : lists) {
    auto it = references.find(l.utt_id);
    if (it == references.end()) throw StructuralError("no reference for utterance " + l.utt_id);
    refs.push_back(it->second);
  }
  TuningResult result;
  bool first = true;
  for (double a : alphas) {
    for (double q : quantiles) {
      RescoreConfig config = base;
      config.alpha = a;
      config.gate_quantile = q;
      const auto out = GateAndRescore(lists, qe, config).output;
      std::vector<Sentence> hyps;
      hyps.reserve(out.size());
      for (const auto &t : out) hyps.push_back(t.tokens);
      const TuningPoint point{a, q, Bleu(refs, hyps).bleu};
      result.grid.push_back(point);
      if (first || point.bleu > result.best.bleu) result.best = point;
      first = false;
    }
  }
  return result;
}

std::vector<int> OracleSelect(const std::vector<NBestList> &lists,
                              const std::map<std::string, Sentence> &references,
                              const SentenceMetric &metric) {
  std::vector<int> ranks;
  ranks.reserve(lists.size());
  for (const auto &l : lists) {
    auto it = references.find(l.utt_id);
    if (it == references.end()) {
      throw StructuralError("no reference for utterance " + l.utt_id);
    }
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < l.size(); ++i) {
      const double s = metric(it->second, l.hypotheses[i].tokens);
      if (s > best_score) {
        best_score = s;
        best = i;
      }
    }
    ranks.push_back(static_cast<int>(best) + 1);
  }
  return ranks;
}

}  // namespace cascade
