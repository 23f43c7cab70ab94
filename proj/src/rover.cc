// src/rover.cc
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
// Word transition network construction and voting.

#include "cascade/rover.h"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "cascade/errors.h"
#include "cascade/parallel.h"

namespace cascade {
namespace {

enum class Move { kMatch, kSubstitute, kDelete, kInsert };

double ConfidenceOf(const SystemHypothesis &h, std::size_t j) {
  return h.confidences.empty() ? kDefaultWordConfidence : h.confidences[j];
}

}  // namespace

int WordTransitionNetwork::Align(const SystemHypothesis &hyp) {
  if (!hyp.confidences.empty() && hyp.confidences.size() != hyp.tokens.size()) {
    throw std::invalid_argument("system " + hyp.system_id +
                                ": one confidence per token required");
  }
  const std::size_t n = slots_.size();
  const std::size_t m = hyp.tokens.size();
  std::vector<int> cost((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> int & { return cost[i * (m + 1) + j]; };
  auto in_slot = [&](std::size_t i, std::size_t j) {
    return slots_[i - 1].count(hyp.tokens[j - 1]) > 0;
  };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      at(i, j) = std::min({at(i - 1, j - 1) + (in_slot(i, j) ? 0 : 1),
                           at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  std::vector<Move> moves;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool match = in_slot(i, j);
      if (at(i, j) == at(i - 1, j - 1) + (match ? 0 : 1)) {
        moves.push_back(match ? Move::kMatch : Move::kSubstitute);
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      moves.push_back(Move::kDelete);
      --i;
    } else {
      moves.push_back(Move::kInsert);
      --j;
    }
  }
  std::reverse(moves.begin(), moves.end());

  std::vector<Slot> merged;
  merged.reserve(n + m);
  std::size_t si = 0, tj = 0;
  for (Move move : moves) {
    switch (move) {
      case Move::kMatch:
      case Move::kSubstitute: {
        Slot slot = std::move(slots_[si++]);
        auto &e = slot[hyp.tokens[tj]];
        ++e.votes;
        e.confidence_sum += ConfidenceOf(hyp, tj);
        ++tj;
        merged.push_back(std::move(slot));
        break;
      }
      case Move::kDelete: {
        Slot slot = std::move(slots_[si++]);
        ++slot[std::nullopt].votes;
        merged.push_back(std::move(slot));
        break;
      }
      case Move::kInsert: {
        Slot slot;
        slot[hyp.tokens[tj]] = SlotEntry{1, ConfidenceOf(hyp, tj)};
        if (num_systems_ > 0) slot[std::nullopt].votes = num_systems_;
        ++tj;
        merged.push_back(std::move(slot));
        break;
      }
    }
  }
  slots_ = std::move(merged);
  ++num_systems_;
  return at(n, m);
}

Sentence WordTransitionNetwork::Vote(double alpha, double null_confidence) const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in [0, 1]");
  Sentence out;
  const double systems = static_cast<double>(std::max(1, num_systems_));
  for (const Slot &slot : slots_) {
    const std::optional<std::string> *best = nullptr;
    double best_score = 0.0;
    // Words first in lexicographic order, NULL last; strict > keeps the
    // earliest candidate on ties.
    auto consider = [&](const std::optional<std::string> &word, const SlotEntry &e) {
      const double conf = word ? e.confidence_sum / e.votes : null_confidence;
      const double score = alpha * (e.votes / systems) + (1.0 - alpha) * conf;
      if (best == nullptr || score > best_score) {
        best = &word;
        best_score = score;
      }
    };
    for (const auto &[word, e] : slot) {
      if (word) consider(word, e);
    }
    if (auto it = slot.find(std::nullopt); it != slot.end()) consider(it->first, it->second);
    if (best != nullptr && best->has_value()) out.push_back(**best);
  }
  return out;
}

std::vector<Transcript> RoverCombine(
    const std::vector<std::vector<Transcript>> &systems,
    const RoverOptions &options) {
  if (systems.empty()) throw std::invalid_argument("ROVER needs at least one system");
  std::vector<std::unordered_map<std::string, const Transcript *>> index(systems.size());
  for (std::size_t k = 0; k < systems.size(); ++k) {
    for (const auto &t : systems[k]) index[k].emplace(t.utt_id, &t);
  }
  for (std::size_t k = 1; k < systems.size(); ++k) {
    for (const auto &t : systems[k]) {
      if (!index[0].count(t.utt_id)) {
        throw StructuralError("utterance " + t.utt_id + " missing from system 1");
      }
    }
  }
  const auto &first = systems[0];
  std::vector<Transcript> out(first.size());
  ParallelFor(first.size(), options.threads, [&](std::size_t u) {
    const std::string &utt = first[u].utt_id;
    WordTransitionNetwork wtn;
    for (std::size_t k = 0; k < systems.size(); ++k) {
      auto it = index[k].find(utt);
      if (it == index[k].end()) {
        throw StructuralError("utterance " + utt + " missing from system " +
                              std::to_string(k + 1));
      }
      wtn.Align({std::to_string(k + 1), it->second->tokens, it->second->confidences});
    }
    out[u].utt_id = utt;
    out[u].tokens = wtn.Vote(options.alpha, options.null_confidence);
  });
  return out;
}

}  // namespace cascade
