// include/cascade/ngram.h
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
// N-gram counting, interpolated modified Kneser-Ney estimation and back-off
// queries. Probabilities are kept as natural logs; the public Score()
// returns log10 to match the ARPA convention.

#ifndef CASCADE_NGRAM_H_
#define CASCADE_NGRAM_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cascade/corpus.h"

namespace cascade {

using NGram = std::vector<WordId>;

struct NGramHash {
  std::size_t operator()(const NGram &ngram) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (WordId w : ngram) {
      h ^= static_cast<std::uint32_t>(w);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

template <typename V>
using NGramMap = std::unordered_map<NGram, V, NGramHash>;

inline constexpr double kLn10 = 2.302585092994045684;

// Interface shared by single and interpolated models.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;
  virtual int order() const = 0;
  // log10 p(token | history) for every token of `sentence` followed by </s>;
  // the history starts with <s>. Size is sentence.size() + 1.
  virtual std::vector<double> SentenceLog10Probs(const Sentence &sentence) const = 0;
};

// Raw counts per order plus the Kneser-Ney adjusted counts. For the top
// order and for n-grams starting with <s>, the adjusted count is the raw
// count; otherwise it is the continuation count N1+(. g), the number of
// distinct words seen immediately before g.
struct CountTable {
  int order = 0;
  std::shared_ptr<const Vocabulary> vocab;
  std::vector<NGramMap<std::int64_t>> raw;       // raw[n - 1]
  std::vector<NGramMap<std::int64_t>> adjusted;  // adjusted[n - 1]
  // n1..n4 over adjusted counts, per order.
  std::vector<std::array<std::int64_t, 4>> counts_of_counts;

  std::int64_t Raw(const NGram &ngram) const;
  std::int64_t Adjusted(const NGram &ngram) const;
  // Continuation count of a lower-order n-gram (0 when never preceded).
  std::int64_t Continuation(const NGram &ngram) const;
};

// Each sentence is padded as <s> w1 .. wI </s>; tokens outside `vocab` are
// counted as <unk>. <s> itself is never a predicted event.
CountTable CountNGrams(std::span<const Sentence> corpus, int order,
                       const Vocabulary &vocab);

// Three-discount scheme D1, D2, D3+ for one order.
struct Discounts {
  double d1 = 0.0;
  double d2 = 0.0;
  double d3plus = 0.0;
  bool fallback = false;  // single discount used for all counts

  double For(std::int64_t count) const {
    if (count <= 0) return 0.0;
    if (count == 1) return d1;
    if (count == 2) return d2;
    return d3plus;
  }
};

// Lower and upper clamp of the single fallback discount.
inline constexpr double kMinFallbackDiscount = 0.01;
inline constexpr double kMaxFallbackDiscount = 0.99;

// D1 = 1 - 2Y n2/n1, D2 = 2 - 3Y n3/n2, D3+ = 3 - 4Y n4/n3 with
// Y = n1 / (n1 + 2 n2). Falls back to one discount D = Y, clamped to
// [kMinFallbackDiscount, kMaxFallbackDiscount], when any of n1..n4 is zero
// or a discount leaves (0, k) for count k.
Discounts ComputeDiscounts(const std::array<std::int64_t, 4> &counts_of_counts);

struct NGramEntry {
  double log_prob = 0.0;     // natural log
  double log_backoff = 0.0;  // natural log, 0 when absent
};

class NGramModel : public LanguageModel {
 public:
  NGramModel(int order, std::shared_ptr<const Vocabulary> vocab);

  int order() const override { return order_; }
  const Vocabulary &vocab() const { return *vocab_; }
  const std::shared_ptr<const Vocabulary> &shared_vocab() const { return vocab_; }

  // Table of n-grams of length n, 1 <= n <= order().
  const NGramMap<NGramEntry> &table(int n) const { return tables_.at(n - 1); }
  NGramMap<NGramEntry> &mutable_table(int n) { return tables_.at(n - 1); }

  const NGramEntry *Find(std::span<const WordId> ngram) const;
  std::size_t NumEntries(int n) const { return table(n).size(); }

  // Natural-log back-off probability; only the last order()-1 context words
  // are used. Returns -inf when `word` has no unigram entry.
  double LogProb(std::span<const WordId> context, WordId word) const;

  // log10 p(word | context); OOV tokens are scored as <unk>.
  double Score(std::span<const std::string> context, std::string_view word) const;

  std::vector<double> SentenceLog10Probs(const Sentence &sentence) const override;

  // Discounts used at each order when the model came from EstimateMkn.
  const std::vector<Discounts> &discounts() const { return discounts_; }
  void set_discounts(std::vector<Discounts> d) { discounts_ = std::move(d); }

 private:
  int order_;
  std::shared_ptr<const Vocabulary> vocab_;
  std::vector<NGramMap<NGramEntry>> tables_;
  std::vector<Discounts> discounts_;
};

// Interpolated modified Kneser-Ney. The unigram level interpolates with the
// uniform distribution over the vocabulary minus <s>; every vocabulary word
// gets a unigram entry and back-off weights equal the interpolation mass of
// each context.
NGramModel EstimateMkn(const CountTable &counts);

// Convenience: vocabulary from the corpus, counts, estimate.
NGramModel TrainMkn(std::span<const Sentence> corpus, int order,
                    const Vocabulary &vocab);

}  // namespace cascade

#endif  // CASCADE_NGRAM_H_
