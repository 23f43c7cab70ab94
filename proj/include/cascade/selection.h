// include/cascade/selection.h
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
// Cross-entropy-difference data selection: score each candidate sentence by
// H_in(s) - H_out(s), keep the lowest-scoring ones.

#ifndef CASCADE_SELECTION_H_
#define CASCADE_SELECTION_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cascade/corpus.h"
#include "cascade/ngram.h"

namespace cascade {

struct ScoredSentence {
  std::size_t index = 0;  // source line
  double h_id = 0.0;      // bits/word under the in-domain model
  double h_ood = 0.0;     // bits/word under the out-of-domain model
  double ced = 0.0;       // h_id - h_ood
};

struct SelectionReport {
  std::size_t corpus_size = 0;
  std::vector<std::size_t> ranking;  // all indices, non-decreasing CED
  std::size_t chosen = 0;            // size of the selected prefix
  double fraction = 0.0;             // requested fraction, 0 for line search
  std::vector<std::size_t> grid;     // line-search candidates
  std::vector<double> grid_values;   // dev bits/word per candidate

  std::span<const std::size_t> selected() const {
    return std::span(ranking).first(chosen);
  }
};

std::vector<ScoredSentence> ScoreCed(const LanguageModel &in_domain,
                                     const LanguageModel &out_of_domain,
                                     std::span<const Sentence> corpus,
                                     int threads = 1);

// Indices sorted by CED, ties in source order.
std::vector<std::size_t> RankByCed(std::span<const ScoredSentence> scored);

// ceil(fraction * count) lowest-CED sentences; fraction in (0, 1].
SelectionReport SelectFraction(std::span<const ScoredSentence> scored,
                               double fraction);

struct LineSearchOptions {
  int order = 3;
  int threads = 1;
};

// For every batch size k in `grid` (strictly increasing), trains a modified
// Kneser-Ney model on the k lowest-CED sentences and measures the dev
// cross-entropy; the minimizing k is chosen. All batch models share one
// vocabulary built from the candidate corpus and the dev corpus. Candidate
// sizes beyond the corpus size are clipped.
SelectionReport LineSearchBatch(std::span<const ScoredSentence> scored,
                                std::span<const Sentence> corpus,
                                std::span<const Sentence> dev,
                                std::span<const std::size_t> grid,
                                const LineSearchOptions &options = {});

// Target-side lines at the selected indices, in selection order.
std::vector<std::string> ExtractParallel(const SelectionReport &selection,
                                         std::span<const std::string> target);

}  // namespace cascade

#endif  // CASCADE_SELECTION_H_
