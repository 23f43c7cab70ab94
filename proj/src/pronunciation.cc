// src/pronunciation.cc
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
// Pronunciation probability estimation and lexicon I/O.

#include "cascade/pronunciation.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cascade/errors.h"
#include "cascade/nbest.h"

namespace cascade {
namespace {

std::vector<std::string> SplitFields(const std::string &line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

void Normalize(std::vector<PronEntry> *entries) {
  double total = 0.0;
  for (const auto &e : *entries) total += e.probability;
  for (auto &e : *entries) e.probability /= total;
}

}  // namespace

PronLexicon EstimatePronunciationProbs(const PronCounts &counts,
                                       const DecodeLexicon &decode_lexicon,
                                       double floor) {
  if (!(floor > 0.0)) throw std::invalid_argument("pronunciation floor must be positive");
  PronLexicon lexicon;
  auto observed_total = [&](const std::string &word) {
    auto it = counts.find(word);
    if (it == counts.end()) return 0.0;
    double total = 0.0;
    for (const auto &[pron, c] : it->second) {
      if (c < 0.0) throw std::invalid_argument("negative count for " + word);
      total += c;
    }
    return total;
  };

  for (const auto &[word, prons] : decode_lexicon) {
    if (prons.empty()) {
      throw std::invalid_argument("no pronunciations for " + word);
    }
    std::vector<PronEntry> entries;
    const double total = observed_total(word);
    if (total <= 0.0) {
      const double p = 1.0 / static_cast<double>(prons.size());
      for (const auto &pron : prons) entries.push_back({pron, p});
    } else {
      const auto &observed = counts.at(word);
      for (const auto &pron : prons) {
        auto it = observed.find(pron);
        const double c = it == observed.end() ? 0.0 : it->second;
        entries.push_back({pron, c > 0.0 ? c / total : floor});
      }
      for (const auto &[pron, c] : observed) {
        if (c > 0.0 && std::find(prons.begin(), prons.end(), pron) == prons.end()) {
          entries.push_back({pron, c / total});
        }
      }
      Normalize(&entries);
    }
    lexicon.emplace(word, std::move(entries));
  }

  // Observed words that the decoding dictionary does not list.
  for (const auto &[word, observed] : counts) {
    if (decode_lexicon.count(word)) continue;
    const double total = observed_total(word);
    if (total <= 0.0) continue;
    std::vector<PronEntry> entries;
    for (const auto &[pron, c] : observed) {
      if (c > 0.0) entries.push_back({pron, c / total});
    }
    Normalize(&entries);
    lexicon.emplace(word, std::move(entries));
  }
  return lexicon;
}

PronCounts ReadPronCounts(std::istream &in, const std::string &source_name) {
  PronCounts counts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = SplitFields(line);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      throw ParseError(source_name, line_no, "expected word\\tpronunciation\\tcount");
    }
    auto count = ParseDouble(fields[2]);
    if (!count || !std::isfinite(*count) || *count < 0.0) {
      throw ParseError(source_name, line_no, "bad count '" + fields[2] + "'");
    }
    counts[fields[0]][fields[1]] += *count;
  }
  return counts;
}

DecodeLexicon ReadDecodeLexicon(std::istream &in, const std::string &source_name) {
  DecodeLexicon lexicon;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = SplitFields(line);
    if (fields.size() < 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError(source_name, line_no, "expected word\\tpronunciation");
    }
    auto &prons = lexicon[fields[0]];
    if (std::find(prons.begin(), prons.end(), fields[1]) == prons.end()) {
      prons.push_back(fields[1]);
    }
  }
  return lexicon;
}

void WritePronLexicon(const PronLexicon &lexicon, std::ostream &out) {
  for (const auto &[word, entries] : lexicon) {
    for (const auto &e : entries) {
      out << word << '\t' << e.pronunciation << '\t'
          << FormatDouble(e.probability) << '\n';
    }
  }
}

}  // namespace cascade
