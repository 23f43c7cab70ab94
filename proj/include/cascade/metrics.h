// include/cascade/metrics.h
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
// WER and BLEU.

#ifndef CASCADE_METRICS_H_
#define CASCADE_METRICS_H_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cascade/corpus.h"

namespace cascade {

struct WerReport {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t reference_length = 0;
  // Set when the reference is empty but the hypothesis is not; the rate is
  // then computed with a reference length of 1.
  bool empty_reference = false;

  std::size_t errors() const { return substitutions + deletions + insertions; }
  double wer() const;  // fraction, not percent

  WerReport &operator+=(const WerReport &other);
};

// Unit-cost Levenshtein alignment. Among minimal alignments, substitutions
// are preferred over deletions, and deletions over insertions.
WerReport Wer(std::span<const std::string> reference,
              std::span<const std::string> hypothesis);

// Counts are summed before dividing. Throws StructuralError on a line-count
// mismatch.
WerReport CorpusWer(std::span<const Sentence> references,
                    std::span<const Sentence> hypotheses);

inline constexpr int kBleuOrder = 4;

struct BleuStats {
  std::vector<std::size_t> matches;  // clipped, per order
  std::vector<std::size_t> totals;   // hypothesis n-grams, per order
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;

  explicit BleuStats(int max_order = kBleuOrder)
      : matches(max_order, 0), totals(max_order, 0) {}
  BleuStats &operator+=(const BleuStats &other);
};

BleuStats ComputeBleuStats(std::span<const std::string> reference,
                           std::span<const std::string> hypothesis,
                           int max_order = kBleuOrder);

struct BleuReport {
  std::vector<double> precisions;  // modified n-gram precision per order
  double brevity_penalty = 1.0;
  double bleu = 0.0;               // x100
  std::string diagnostic;          // set when BLEU collapses to 0
  std::vector<double> sentence_bleu;  // optional, x100
};

BleuReport BleuFromStats(const BleuStats &stats);

// Corpus BLEU with a single reference per segment.
BleuReport Bleu(std::span<const Sentence> references,
                std::span<const Sentence> hypotheses, int max_order = kBleuOrder,
                bool per_sentence = false);

// Smoothed sentence BLEU (x100): orders >= 2 whose clipped match count is
// zero use (m + 1) / (t + 1); other orders are unsmoothed. Empty
// hypothesis scores 0.
double SentenceBleu(std::span<const std::string> reference,
                    std::span<const std::string> hypothesis,
                    int max_order = kBleuOrder);

// Lowercases ASCII letters of every token.
Sentence Lowercase(const Sentence &sentence);

}  // namespace cascade

#endif  // CASCADE_METRICS_H_
