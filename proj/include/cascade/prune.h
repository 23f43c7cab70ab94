// include/cascade/prune.h
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
// Relative-entropy pruning of back-off models.

#ifndef CASCADE_PRUNE_H_
#define CASCADE_PRUNE_H_

#include <cstddef>
#include <vector>

#include "cascade/ngram.h"

namespace cascade {

struct PruneStats {
  std::vector<std::size_t> removed;  // per order, index n - 1
  std::size_t total_removed() const;
};

// Weighted relative entropy between the model and the model with `ngram`
// (order >= 2) removed and its context's back-off weight re-derived.
double PruningCost(const NGramModel &model, std::span<const WordId> ngram);

// Removes every n-gram of order >= 2 whose pruning cost is <= `threshold`,
// each cost measured against the unpruned model. An n-gram that is the
// context of a surviving longer n-gram is kept. Back-off weights are
// recomputed afterwards so each context still normalizes; unigrams are
// never removed. Larger thresholds remove a superset of entries.
NGramModel Prune(const NGramModel &model, double threshold,
                 PruneStats *stats = nullptr);

}  // namespace cascade

#endif  // CASCADE_PRUNE_H_
