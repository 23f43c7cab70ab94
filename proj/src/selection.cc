// src/selection.cc
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
// Moore-Lewis style selection.

#include "cascade/selection.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "cascade/errors.h"
#include "cascade/lm_eval.h"
#include "cascade/parallel.h"

namespace cascade {

std::vector<ScoredSentence> ScoreCed(const LanguageModel &in_domain,
                                     const LanguageModel &out_of_domain,
                                     std::span<const Sentence> corpus,
                                     int threads) {
  std::vector<ScoredSentence> scored(corpus.size());
  ParallelFor(corpus.size(), threads, [&](std::size_t i) {
    ScoredSentence &s = scored[i];
    s.index = i;
    s.h_id = CrossEntropy(in_domain, corpus[i]);
    s.h_ood = CrossEntropy(out_of_domain, corpus[i]);
    s.ced = s.h_id - s.h_ood;
  });
  return scored;
}

std::vector<std::size_t> RankByCed(std::span<const ScoredSentence> scored) {
  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scored[a].ced != scored[b].ced) return scored[a].ced < scored[b].ced;
    return scored[a].index < scored[b].index;
  });
  std::vector<std::size_t> ranking;
  ranking.reserve(order.size());
  for (std::size_t i : order) ranking.push_back(scored[i].index);
  return ranking;
}

SelectionReport SelectFraction(std::span<const ScoredSentence> scored,
                               double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("fraction must be in (0, 1]");
  }
  SelectionReport report;
  report.corpus_size = scored.size();
  report.fraction = fraction;
  report.ranking = RankByCed(scored);
  // The small slack keeps 0.55 * 500 at 275 despite rounding.
  const double want = std::ceil(fraction * static_cast<double>(scored.size()) - 1e-9);
  report.chosen = std::min(scored.size(), static_cast<std::size_t>(std::max(0.0, want)));
  return report;
}

SelectionReport LineSearchBatch(std::span<const ScoredSentence> scored,
                                std::span<const Sentence> corpus,
                                std::span<const Sentence> dev,
                                std::span<const std::size_t> grid,
                                const LineSearchOptions &options) {
  if (dev.empty()) throw std::invalid_argument("line search needs a dev corpus");
  if (grid.empty()) throw std::invalid_argument("empty batch grid");
  if (scored.size() != corpus.size()) {
    throw StructuralError("scores and corpus differ in length");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) throw std::invalid_argument("batch grid must increase");
  }
  SelectionReport report;
  report.corpus_size = corpus.size();
  report.ranking = RankByCed(scored);

  std::vector<Sentence> pool(corpus.begin(), corpus.end());
  pool.insert(pool.end(), dev.begin(), dev.end());
  const Vocabulary vocab =
      BuildVocabulary(pool, std::numeric_limits<std::size_t>::max(), 1);

  for (std::size_t k : grid) report.grid.push_back(std::min(k, corpus.size()));
  report.grid_values.assign(report.grid.size(), 0.0);
  // Candidates are independent; results land by grid position.
  ParallelFor(report.grid.size(), options.threads, [&](std::size_t g) {
    std::vector<Sentence> batch;
    batch.reserve(report.grid[g]);
    for (std::size_t r = 0; r < report.grid[g]; ++r) {
      batch.push_back(corpus[report.ranking[r]]);
    }
    const NGramModel lm = TrainMkn(batch, options.order, vocab);
    report.grid_values[g] = ScoreCorpus(lm, dev).bits_per_word();
  });
  std::size_t best = 0;
  for (std::size_t g = 1; g < report.grid.size(); ++g) {
    if (report.grid_values[g] < report.grid_values[best]) best = g;
  }
  report.chosen = report.grid[best];
  return report;
}

std::vector<std::string> ExtractParallel(const SelectionReport &selection,
                                         std::span<const std::string> target) {
  if (target.size() != selection.corpus_size) {
    throw StructuralError("source has " + std::to_string(selection.corpus_size) +
                          " lines but target has " + std::to_string(target.size()));
  }
  std::vector<std::string> out;
  out.reserve(selection.chosen);
  for (std::size_t i : selection.selected()) out.push_back(target[i]);
  return out;
}

}  // namespace cascade
