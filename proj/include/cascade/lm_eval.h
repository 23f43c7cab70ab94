// include/cascade/lm_eval.h
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
// Cross-entropy, perplexity and EM-tuned linear interpolation of language
// models.

#ifndef CASCADE_LM_EVAL_H_
#define CASCADE_LM_EVAL_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cascade/ngram.h"

namespace cascade {

// Bits per word: -(1/(I+1)) sum log2 p over the I tokens and </s>.
double CrossEntropy(const LanguageModel &lm, const Sentence &sentence);

// Corpus-level totals; per-sentence work runs in parallel and is reduced in
// corpus order.
struct CorpusEntropy {
  double log10_prob = 0.0;  // sum over all events
  std::size_t events = 0;   // tokens plus one </s> per sentence

  double bits_per_word() const;
  double perplexity() const;
};

CorpusEntropy ScoreCorpus(const LanguageModel &lm, std::span<const Sentence> corpus,
                          int threads = 1);

// 2^(corpus-level cross-entropy).
double Perplexity(const LanguageModel &lm, std::span<const Sentence> corpus,
                  int threads = 1);

struct InterpolationWeights {
  std::vector<std::string> components;
  std::vector<double> weights;
};

// p(w | h) = sum_i weight_i p_i(w | h).
class InterpolatedModel : public LanguageModel {
 public:
  InterpolatedModel(std::vector<std::shared_ptr<const LanguageModel>> components,
                    std::vector<double> weights);

  int order() const override;
  std::vector<double> SentenceLog10Probs(const Sentence &sentence) const override;
  const std::vector<double> &weights() const { return weights_; }

 private:
  std::vector<std::shared_ptr<const LanguageModel>> components_;
  std::vector<double> weights_;
};

struct InterpolationOptions {
  int max_iterations = 200;
  double tolerance = 1e-6;  // on max |delta lambda|
  int threads = 1;
};

struct InterpolationResult {
  std::vector<double> weights;
  // Dev log-likelihood (natural log) at the initial weights and after each
  // EM update.
  std::vector<double> log_likelihood;
  int iterations = 0;
  bool converged = false;
  std::size_t skipped_events = 0;  // events every component gives zero
};

// EM from uniform weights on the dev corpus. Throws std::invalid_argument
// for fewer than two components or an empty dev corpus.
InterpolationResult EstimateInterpolation(
    std::span<const LanguageModel *const> components,
    std::span<const Sentence> dev, const InterpolationOptions &options = {});

}  // namespace cascade

#endif  // CASCADE_LM_EVAL_H_
