// src/prune.cc
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
// Relative-entropy pruning.

#include "cascade/prune.h"

#include <cmath>
#include <stdexcept>

namespace cascade {
namespace {

struct ContextMass {
  double stored = 0.0;  // sum of p(w | h) over stored h w
  double lower = 0.0;   // sum of p(w | h') over the same words
};

// Per-context sums over the stored extensions at order n + 1.
NGramMap<ContextMass> ContextMasses(const NGramModel &model, int n) {
  NGramMap<ContextMass> masses;
  NGram context;
  for (const auto &[ngram, entry] : model.table(n + 1)) {
    context.assign(ngram.begin(), ngram.end() - 1);
    auto &m = masses[context];
    m.stored += std::exp(entry.log_prob);
    m.lower += std::exp(model.LogProb(std::span(context).subspan(1), ngram.back()));
  }
  return masses;
}

double HistoryLogProb(const NGramModel &model, std::span<const WordId> history) {
  double lp = 0.0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (i == 0 && history[0] == Vocabulary::kStartId) continue;
    lp += model.LogProb(history.first(i), history[i]);
  }
  return lp;
}

double Cost(const NGramModel &model, std::span<const WordId> ngram,
            const ContextMass &mass, double history_log_prob) {
  const auto context = ngram.first(ngram.size() - 1);
  const NGramEntry *entry = model.Find(ngram);
  const NGramEntry *ctx_entry = model.Find(context);
  if (entry == nullptr || ctx_entry == nullptr) {
    throw std::invalid_argument("n-gram or its context is not stored");
  }
  const double p = std::exp(entry->log_prob);
  const double lower_log = model.LogProb(context.subspan(1), ngram.back());
  const double lower = std::exp(lower_log);
  // Mass of the words that already back off from this context.
  const double backed_off = std::max(0.0, 1.0 - mass.stored);
  const double denominator = std::max(0.0, 1.0 - mass.lower);
  const double new_log_backoff =
      std::log(backed_off + p) - std::log(denominator + lower);
  double inner = p * (lower_log + new_log_backoff - entry->log_prob);
  if (backed_off > 0.0) {
    inner += backed_off * (new_log_backoff - ctx_entry->log_backoff);
  }
  return -std::exp(history_log_prob) * inner;
}

}  // namespace

std::size_t PruneStats::total_removed() const {
  std::size_t total = 0;
  for (auto r : removed) total += r;
  return total;
}

double PruningCost(const NGramModel &model, std::span<const WordId> ngram) {
  if (ngram.size() < 2) throw std::invalid_argument("unigrams are not pruned");
  const int n = static_cast<int>(ngram.size()) - 1;
  NGram context(ngram.begin(), ngram.end() - 1);
  ContextMass mass;
  for (const auto &[other, entry] : model.table(n + 1)) {
    if (std::equal(context.begin(), context.end(), other.begin())) {
      mass.stored += std::exp(entry.log_prob);
      mass.lower += std::exp(model.LogProb(std::span(context).subspan(1), other.back()));
    }
  }
  return Cost(model, ngram, mass, HistoryLogProb(model, context));
}

NGramModel Prune(const NGramModel &model, double threshold, PruneStats *stats) {
  if (!(threshold >= 0.0)) throw std::invalid_argument("pruning threshold must be >= 0");
  const int order = model.order();
  std::vector<NGramMap<bool>> removed(order);  // removed[n - 1]
  // Surviving extensions per context, filled while handling the order above.
  NGramMap<std::size_t> surviving_children;

  NGram context;
  for (int n = order; n >= 2; --n) {
    const auto masses = ContextMasses(model, n - 1);
    NGramMap<double> history_log_probs;
    NGramMap<std::size_t> next_children;
    for (const auto &[ngram, entry] : model.table(n)) {
      context.assign(ngram.begin(), ngram.end() - 1);
      bool drop = false;
      if (!surviving_children.count(ngram)) {
        auto [it, inserted] = history_log_probs.try_emplace(context, 0.0);
        if (inserted) it->second = HistoryLogProb(model, context);
        const double cost = Cost(model, ngram, masses.at(context), it->second);
        drop = cost <= threshold;
      }
      if (drop) {
        removed[n - 1][ngram] = true;
      } else {
        ++next_children[context];
      }
    }
    surviving_children = std::move(next_children);
  }

  std::size_t total = 0;
  for (const auto &r : removed) total += r.size();
  if (stats != nullptr) {
    stats->removed.assign(order, 0);
    for (int n = 1; n <= order; ++n) stats->removed[n - 1] = removed[n - 1].size();
  }
  if (total == 0) return model;

  NGramModel pruned(order, model.shared_vocab());
  for (int n = 1; n <= order; ++n) {
    auto &table = pruned.mutable_table(n);
    for (const auto &[ngram, entry] : model.table(n)) {
      if (removed[n - 1].count(ngram)) continue;
      NGramEntry e = entry;
      if (n < order) e.log_backoff = 0.0;
      table.emplace(ngram, e);
    }
  }
  // Lower orders first: p(w | h') of the pruned model must be final before
  // the back-off weight of h is derived from it.
  for (int n = 1; n < order; ++n) {
    const auto masses = ContextMasses(pruned, n);
    auto &contexts = pruned.mutable_table(n);
    for (const auto &[h, mass] : masses) {
      auto &entry = contexts.at(h);
      const double numerator = 1.0 - mass.stored;
      const double denominator = 1.0 - mass.lower;
      if (numerator > 0.0 && denominator > 0.0) {
        entry.log_backoff = std::log(numerator) - std::log(denominator);
      } else {
        entry.log_backoff = model.table(n).at(h).log_backoff;
      }
    }
  }
  return pruned;
}

}  // namespace cascade
