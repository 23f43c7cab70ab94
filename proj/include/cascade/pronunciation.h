// include/cascade/pronunciation.h
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
// Pronunciation probabilities from aligned pronunciation counts.

#ifndef CASCADE_PRONUNCIATION_H_
#define CASCADE_PRONUNCIATION_H_

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace cascade {

// word -> pronunciation -> observed count
using PronCounts = std::map<std::string, std::map<std::string, double>>;
// word -> pronunciations allowed by the decoding dictionary
using DecodeLexicon = std::map<std::string, std::vector<std::string>>;

struct PronEntry {
  std::string pronunciation;
  double probability;
};

using PronLexicon = std::map<std::string, std::vector<PronEntry>>;

inline constexpr double kDefaultPronFloor = 1e-4;

// Relative frequencies for words with observed counts, uniform
// probabilities for decode-lexicon words without any. Pronunciations in
// the decode lexicon but not observed for an otherwise observed word get
// `floor` before renormalization. Words whose counts are all zero count as
// unseen. Observed pronunciations missing from the decode lexicon are kept.
PronLexicon EstimatePronunciationProbs(const PronCounts &counts,
                                       const DecodeLexicon &decode_lexicon,
                                       double floor = kDefaultPronFloor);

// `word\tpronunciation\tcount` rows.
PronCounts ReadPronCounts(std::istream &in, const std::string &source_name);
// `word\tpronunciation` rows; pronunciations keep file order.
DecodeLexicon ReadDecodeLexicon(std::istream &in, const std::string &source_name);
// `word\tpronunciation\tprobability` rows.
void WritePronLexicon(const PronLexicon &lexicon, std::ostream &out);

}  // namespace cascade

#endif  // CASCADE_PRONUNCIATION_H_
