// include/cascade/rover.h
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
// ROVER system combination: sequentially align each system's 1-best into a
// word transition network, then vote slot by slot.

#ifndef CASCADE_ROVER_H_
#define CASCADE_ROVER_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cascade/corpus.h"
#include "cascade/nbest.h"

namespace cascade {

struct SystemHypothesis {
  std::string system_id;
  Sentence tokens;
  std::vector<double> confidences;  // empty, or one per token
};

struct SlotEntry {
  int votes = 0;
  double confidence_sum = 0.0;
};

// A slot maps a word, or std::nullopt for NULL, to its votes. NULL sorts
// before every word in the map; voting puts it last on ties.
using Slot = std::map<std::optional<std::string>, SlotEntry>;

class WordTransitionNetwork {
 public:
  const std::vector<Slot> &slots() const { return slots_; }
  int num_systems() const { return num_systems_; }

  // Minimum-edit alignment against the existing slots. Matching a word
  // already in a slot costs 0, any other substitution, deletion or
  // insertion costs 1. Ties prefer match, then substitution, deletion,
  // insertion. Returns the alignment cost.
  int Align(const SystemHypothesis &hypothesis);

  // Per slot: alpha * votes / N + (1 - alpha) * mean confidence, NULL using
  // `null_confidence`. The argmax is emitted unless it is NULL; ties go to
  // the lexicographically smallest word, NULL last.
  Sentence Vote(double alpha, double null_confidence) const;

 private:
  std::vector<Slot> slots_;
  int num_systems_ = 0;
};

// Confidence assumed for tokens whose system gave none.
inline constexpr double kDefaultWordConfidence = 1.0;
inline constexpr double kDefaultNullConfidence = 0.7;

struct RoverOptions {
  double alpha = 1.0;
  double null_confidence = kDefaultNullConfidence;
  int threads = 1;
};

// `systems[k]` is the transcript list of system k. Output follows the
// utterance order of the first system. Throws StructuralError naming any
// utterance missing from (or only present in) some system.
std::vector<Transcript> RoverCombine(
    const std::vector<std::vector<Transcript>> &systems,
    const RoverOptions &options = {});

}  // namespace cascade

#endif  // CASCADE_ROVER_H_
