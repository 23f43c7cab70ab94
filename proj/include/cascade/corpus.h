// include/cascade/corpus.h
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
// Tokenized sentences, vocabularies and the streaming corpus reader.

#ifndef CASCADE_CORPUS_H_
#define CASCADE_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cascade {

using Sentence = std::vector<std::string>;
using WordId = std::int32_t;

inline constexpr std::string_view kSentenceStart = "<s>";
inline constexpr std::string_view kSentenceEnd = "</s>";
inline constexpr std::string_view kUnknown = "<unk>";

// Validates UTF-8 and returns the NFC-normalized form. Throws
// std::invalid_argument on ill-formed input.
std::string NormalizeUtf8(std::string_view text);

// Number of code points in well-formed UTF-8.
std::size_t Utf8Length(std::string_view text);

// Splits on ASCII whitespace; no other segmentation.
Sentence Tokenize(std::string_view line);

std::string Join(std::span<const std::string> tokens, char sep = ' ');

// Closed word list with dense ids. Ids 0, 1, 2 are always <s>, </s>, <unk>.
class Vocabulary {
 public:
  static constexpr WordId kStartId = 0;
  static constexpr WordId kEndId = 1;
  static constexpr WordId kUnknownId = 2;

  Vocabulary();

  // Adds `word` if absent; returns its id either way.
  WordId Add(std::string_view word);

  // Id of `word`, or kUnknownId if not present.
  WordId Find(std::string_view word) const;
  bool Contains(std::string_view word) const;

  const std::string &Word(WordId id) const { return words_.at(id); }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string> &words() const { return words_; }

  std::vector<WordId> Map(std::span<const std::string> tokens) const;

  bool operator==(const Vocabulary &other) const {
    return words_ == other.words_;
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> ids_;
};

// Most frequent words up to `max_size` entries including the three reserved
// symbols. Ties are broken lexicographically; words seen fewer than
// `min_count` times are dropped.
Vocabulary BuildVocabulary(std::span<const Sentence> corpus,
                           std::size_t max_size = 60000,
                           std::size_t min_count = 1);

// When `vocab` is set, tokens outside it are replaced by <unk>.
struct VocabPolicy {
  const Vocabulary *vocab = nullptr;
};

// Single-pass reader: one sentence per line, whitespace-delimited tokens.
class CorpusReader {
 public:
  explicit CorpusReader(const std::string &path, VocabPolicy policy = {});
  CorpusReader(std::istream &in, std::string source_name,
               VocabPolicy policy = {});

  // Reads the next line into `sentence`. Returns false at end of input.
  // Throws ParseError on invalid UTF-8.
  bool Next(Sentence *sentence);

  std::size_t lines_read() const { return lines_read_; }

 private:
  std::unique_ptr<std::ifstream> file_;
  std::istream *in_;
  std::string source_;
  VocabPolicy policy_;
  std::size_t lines_read_ = 0;
};

std::vector<Sentence> ReadCorpus(const std::string &path,
                                 VocabPolicy policy = {});
std::vector<Sentence> ReadCorpus(std::istream &in,
                                 const std::string &source_name = "<stream>",
                                 VocabPolicy policy = {});

void WriteCorpus(std::span<const Sentence> corpus, std::ostream &out);

// Reads all lines of a text file verbatim (no tokenization).
std::vector<std::string> ReadLines(const std::string &path);

}  // namespace cascade

#endif  // CASCADE_CORPUS_H_
