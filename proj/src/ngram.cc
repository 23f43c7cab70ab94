// src/ngram.cc
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
// Counting, modified Kneser-Ney estimation and back-off scoring.

#include "cascade/ngram.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cascade {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct HistoryStats {
  std::int64_t total = 0;
  std::array<std::int64_t, 3> types{};  // N1, N2, N3+ of the extensions
};

}  // namespace

std::int64_t CountTable::Raw(const NGram &ngram) const {
  if (ngram.empty() || static_cast<int>(ngram.size()) > order) return 0;
  const auto &t = raw[ngram.size() - 1];
  auto it = t.find(ngram);
  return it == t.end() ? 0 : it->second;
}

std::int64_t CountTable::Adjusted(const NGram &ngram) const {
  if (ngram.empty() || static_cast<int>(ngram.size()) > order) return 0;
  const auto &t = adjusted[ngram.size() - 1];
  auto it = t.find(ngram);
  return it == t.end() ? 0 : it->second;
}

std::int64_t CountTable::Continuation(const NGram &ngram) const {
  if (ngram.empty() || static_cast<int>(ngram.size()) >= order) return 0;
  std::int64_t distinct = 0;
  for (const auto &[longer, c] : raw[ngram.size()]) {
    if (std::equal(ngram.begin(), ngram.end(), longer.begin() + 1)) ++distinct;
  }
  return distinct;
}

CountTable CountNGrams(std::span<const Sentence> corpus, int order,
                       const Vocabulary &vocab) {
  if (order < 1) throw std::invalid_argument("n-gram order must be >= 1");
  CountTable table;
  table.order = order;
  table.vocab = std::make_shared<const Vocabulary>(vocab);
  table.raw.resize(order);
  table.adjusted.resize(order);
  table.counts_of_counts.assign(order, {0, 0, 0, 0});

  NGram ids;
  NGram key;
  for (const auto &sentence : corpus) {
    ids.clear();
    ids.push_back(Vocabulary::kStartId);
    for (const auto &token : sentence) ids.push_back(vocab.Find(token));
    ids.push_back(Vocabulary::kEndId);
    for (std::size_t pos = 1; pos < ids.size(); ++pos) {
      const std::size_t max_n = std::min<std::size_t>(order, pos + 1);
      for (std::size_t n = 1; n <= max_n; ++n) {
        key.assign(ids.begin() + (pos + 1 - n), ids.begin() + pos + 1);
        ++table.raw[n - 1][key];
      }
    }
  }

  for (int n = 1; n <= order; ++n) {
    auto &adj = table.adjusted[n - 1];
    if (n == order) {
      adj = table.raw[n - 1];
    } else {
      for (const auto &[ngram, c] : table.raw[n - 1]) {
        if (ngram.front() == Vocabulary::kStartId) adj[ngram] = c;
      }
      for (const auto &[longer, c] : table.raw[n]) {
        key.assign(longer.begin() + 1, longer.end());
        if (key.front() != Vocabulary::kStartId) ++adj[key];
      }
    }
    for (const auto &[ngram, c] : adj) {
      if (c >= 1 && c <= 4) ++table.counts_of_counts[n - 1][c - 1];
    }
  }
  return table;
}

Discounts ComputeDiscounts(const std::array<std::int64_t, 4> &coc) {
  const double n1 = static_cast<double>(coc[0]);
  const double n2 = static_cast<double>(coc[1]);
  const double n3 = static_cast<double>(coc[2]);
  const double n4 = static_cast<double>(coc[3]);
  const double y = n1 + 2.0 * n2 > 0.0 ? n1 / (n1 + 2.0 * n2) : 0.0;
  Discounts d;
  if (n1 > 0.0 && n2 > 0.0 && n3 > 0.0 && n4 > 0.0) {
    d.d1 = 1.0 - 2.0 * y * n2 / n1;
    d.d2 = 2.0 - 3.0 * y * n3 / n2;
    d.d3plus = 3.0 - 4.0 * y * n4 / n3;
    if (d.d1 > 0.0 && d.d1 < 1.0 && d.d2 > 0.0 && d.d2 < 2.0 &&
        d.d3plus > 0.0 && d.d3plus < 3.0) {
      return d;
    }
  }
  const double single = std::clamp(y, kMinFallbackDiscount, kMaxFallbackDiscount);
  return Discounts{single, single, single, true};
}

NGramModel::NGramModel(int order, std::shared_ptr<const Vocabulary> vocab)
    : order_(order), vocab_(std::move(vocab)), tables_(order) {
  if (order < 1) throw std::invalid_argument("n-gram order must be >= 1");
}

const NGramEntry *NGramModel::Find(std::span<const WordId> ngram) const {
  if (ngram.empty() || ngram.size() > static_cast<std::size_t>(order_)) {
    return nullptr;
  }
  thread_local NGram key;
  key.assign(ngram.begin(), ngram.end());
  const auto &t = tables_[ngram.size() - 1];
  auto it = t.find(key);
  return it == t.end() ? nullptr : &it->second;
}

double NGramModel::LogProb(std::span<const WordId> context, WordId word) const {
  const std::size_t n = std::min<std::size_t>(context.size(), order_ - 1);
  context = context.subspan(context.size() - n);
  thread_local NGram key;
  double backoff = 0.0;
  for (std::size_t k = n;; --k) {
    key.assign(context.end() - k, context.end());
    key.push_back(word);
    const auto &t = tables_[k];
    if (auto it = t.find(key); it != t.end()) return backoff + it->second.log_prob;
    if (k == 0) break;
    key.pop_back();
    const auto &ct = tables_[k - 1];
    if (auto it = ct.find(key); it != ct.end()) backoff += it->second.log_backoff;
  }
  return kNegInf;
}

double NGramModel::Score(std::span<const std::string> context,
                         std::string_view word) const {
  NGram ids;
  ids.reserve(context.size());
  for (const auto &w : context) {
    ids.push_back(w == kSentenceStart ? Vocabulary::kStartId : vocab_->Find(w));
  }
  return LogProb(ids, vocab_->Find(word)) / kLn10;
}

std::vector<double> NGramModel::SentenceLog10Probs(const Sentence &sentence) const {
  NGram history;
  history.reserve(sentence.size() + 2);
  history.push_back(Vocabulary::kStartId);
  std::vector<double> out;
  out.reserve(sentence.size() + 1);
  for (std::size_t i = 0; i <= sentence.size(); ++i) {
    const WordId w = i < sentence.size() ? vocab_->Find(sentence[i])
                                         : Vocabulary::kEndId;
    out.push_back(LogProb(history, w) / kLn10);
    history.push_back(w);
  }
  return out;
}

NGramModel EstimateMkn(const CountTable &counts) {
  const int order = counts.order;
  NGramModel model(order, counts.vocab);
  std::vector<Discounts> discounts(order);
  const std::size_t predictable = counts.vocab->size() - 1;  // all but <s>
  const double uniform = 1.0 / static_cast<double>(predictable);

  NGram history;
  NGram lower_context;
  for (int n = 1; n <= order; ++n) {
    const Discounts d = ComputeDiscounts(counts.counts_of_counts[n - 1]);
    discounts[n - 1] = d;
    const auto &adj = counts.adjusted[n - 1];

    NGramMap<HistoryStats> stats;
    for (const auto &[ngram, c] : adj) {
      history.assign(ngram.begin(), ngram.end() - 1);
      auto &s = stats[history];
      s.total += c;
      ++s.types[std::min<std::int64_t>(c, 3) - 1];
    }
    auto gamma_of = [&](const HistoryStats &s) {
      return (d.d1 * s.types[0] + d.d2 * s.types[1] + d.d3plus * s.types[2]) /
             static_cast<double>(s.total);
    };

    auto &table = model.mutable_table(n);
    table.reserve(adj.size() + (n == 1 ? counts.vocab->size() : 0));
    for (const auto &[ngram, c] : adj) {
      history.assign(ngram.begin(), ngram.end() - 1);
      const HistoryStats &s = stats.at(history);
      double lower = uniform;
      if (n > 1) {
        lower_context.assign(history.begin() + 1, history.end());
        lower = std::exp(model.LogProb(lower_context, ngram.back()));
      }
      const double p =
          std::max(static_cast<double>(c) - d.For(c), 0.0) / static_cast<double>(s.total) +
          gamma_of(s) * lower;
      table[ngram].log_prob = std::log(p);
    }

    if (n == 1) {
      const auto it = stats.find(NGram{});
      const double gamma = it == stats.end() ? 1.0 : gamma_of(it->second);
      for (WordId w = 0; w < static_cast<WordId>(counts.vocab->size()); ++w) {
        NGram unigram{w};
        if (w == Vocabulary::kStartId) {
          table[unigram].log_prob = kNegInf;
        } else if (!table.count(unigram)) {
          table[unigram].log_prob = std::log(gamma * uniform);
        }
      }
    } else {
      auto &contexts = model.mutable_table(n - 1);
      for (const auto &[h, s] : stats) {
        auto it = contexts.find(h);
        if (it == contexts.end()) {
          throw std::logic_error("history without a lower-order entry");
        }
        it->second.log_backoff = std::log(gamma_of(s));
      }
    }
  }
  model.set_discounts(std::move(discounts));
  return model;
}

NGramModel TrainMkn(std::span<const Sentence> corpus, int order,
                    const Vocabulary &vocab) {
  return EstimateMkn(CountNGrams(corpus, order, vocab));
}

}  // namespace cascade
