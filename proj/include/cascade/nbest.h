// include/cascade/nbest.h
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
// N-best lists and utterance-keyed transcript files.

#ifndef CASCADE_NBEST_H_
#define CASCADE_NBEST_H_

#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "cascade/corpus.h"

namespace cascade {

struct Hypothesis {
  std::string utt_id;
  int rank = 1;              // 1-based
  double acoustic = 0.0;     // log-likelihood
  double lm = 0.0;           // log10 probability
  double total = 0.0;
  double confidence = 0.0;   // [0, 1]
  Sentence tokens;

  bool operator==(const Hypothesis &) const = default;
};

struct NBestList {
  std::string utt_id;
  std::vector<Hypothesis> hypotheses;

  std::size_t size() const { return hypotheses.size(); }
  const Hypothesis &best() const { return hypotheses.front(); }

  bool operator==(const NBestList &) const = default;
};

inline constexpr std::string_view kNBestHeader =
    "utt_id\trank\tacoustic\tlm\ttotal\tconfidence\ttext";

// Throws StructuralError if ranks are not 1..n, the ids differ, the list is
// empty or totals increase with rank.
void ValidateNBest(const NBestList &list);

// Streams N-best lists from the TSV format. Rows of one utterance must be
// consecutive.
class NBestReader {
 public:
  explicit NBestReader(const std::string &path);
  NBestReader(std::istream &in, std::string source_name);

  // Returns std::nullopt at end of input.
  std::optional<NBestList> Next();

 private:
  bool ReadRow(Hypothesis *row);
  void ReadHeader();

  std::unique_ptr<std::ifstream> file_;
  std::istream *in_;
  std::string source_;
  std::size_t line_ = 0;
  std::optional<Hypothesis> pending_;
  std::vector<std::string> finished_;
};

std::vector<NBestList> ReadNBest(const std::string &path);
std::vector<NBestList> ReadNBest(std::istream &in,
                                 const std::string &source_name = "<stream>");
void WriteNBest(const std::vector<NBestList> &lists, std::ostream &out);

// One line per utterance: `utt_id\ttoken[:conf] token[:conf] ...`.
struct Transcript {
  std::string utt_id;
  Sentence tokens;
  std::vector<double> confidences;  // empty, or one per token
};

std::vector<Transcript> ReadTranscripts(const std::string &path);
std::vector<Transcript> ReadTranscripts(std::istream &in,
                                        const std::string &source_name);
void WriteTranscripts(const std::vector<Transcript> &transcripts,
                      std::ostream &out);

// Shortest decimal form that reads back to the same double.
std::string FormatDouble(double value);
// Strict parse of the whole field; std::nullopt on failure.
std::optional<double> ParseDouble(std::string_view field);

}  // namespace cascade

#endif  // CASCADE_NBEST_H_
