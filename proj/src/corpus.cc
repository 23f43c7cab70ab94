// src/corpus.cc
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
// Corpus reading, tokenization and vocabulary construction.

#include "cascade/corpus.h"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <utility>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>
#include <unicode/ustring.h>

#include "cascade/errors.h"
#include "cascade/parallel.h"

namespace cascade {
namespace {

bool IsAscii(std::string_view text) {
  return std::all_of(text.begin(), text.end(),
                     [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

}  // namespace

std::string NormalizeUtf8(std::string_view text) {
  if (IsAscii(text)) return std::string(text);
  UErrorCode status = U_ZERO_ERROR;
  int32_t length = 0;
  u_strFromUTF8(nullptr, 0, &length, text.data(),
                static_cast<int32_t>(text.size()), &status);
  if (status != U_BUFFER_OVERFLOW_ERROR && U_FAILURE(status)) {
    throw std::invalid_argument("invalid UTF-8");
  }
  status = U_ZERO_ERROR;
  const icu::Normalizer2 *nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC unavailable");
  icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  if (nfc->isNormalized(source, status) && U_SUCCESS(status)) {
    return std::string(text);
  }
  status = U_ZERO_ERROR;
  icu::UnicodeString normalized = nfc->normalize(source, status);
  if (U_FAILURE(status)) throw std::invalid_argument("NFC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::size_t Utf8Length(std::string_view text) {
  return static_cast<std::size_t>(std::count_if(
      text.begin(), text.end(),
      [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

Sentence Tokenize(std::string_view line) {
  Sentence tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && IsSpace(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !IsSpace(line[j])) ++j;
    if (j > i) tokens.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::string Join(std::span<const std::string> tokens, char sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(sep);
    out += tokens[i];
  }
  return out;
}

Vocabulary::Vocabulary() {
  Add(kSentenceStart);
  Add(kSentenceEnd);
  Add(kUnknown);
}

WordId Vocabulary::Add(std::string_view word) {
  auto it = ids_.find(std::string(word));
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<WordId>(words_.size());
  words_.emplace_back(word);
  ids_.emplace(words_.back(), id);
  return id;
}

WordId Vocabulary::Find(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  return it == ids_.end() ? kUnknownId : it->second;
}

bool Vocabulary::Contains(std::string_view word) const {
  return ids_.count(std::string(word)) > 0;
}

std::vector<WordId> Vocabulary::Map(std::span<const std::string> tokens) const {
  std::vector<WordId> ids;
  ids.reserve(tokens.size());
  for (const auto &t : tokens) ids.push_back(Find(t));
  return ids;
}

Vocabulary BuildVocabulary(std::span<const Sentence> corpus,
                           std::size_t max_size, std::size_t min_count) {
  if (max_size < 3) {
    throw std::invalid_argument("vocabulary size must leave room for <s>, </s>, <unk>");
  }
  // std::map keeps iteration order independent of hashing.
  std::map<std::string, std::size_t> counts;
  for (const auto &sentence : corpus) {
    for (const auto &token : sentence) ++counts[token];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked;
  ranked.reserve(counts.size());
  for (auto &[word, count] : counts) {
    if (word == kSentenceStart || word == kSentenceEnd || word == kUnknown) {
      continue;
    }
    if (count >= min_count) ranked.emplace_back(word, count);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto &a, const auto &b) { return a.second > b.second; });
  Vocabulary vocab;
  for (const auto &entry : ranked) {
    if (vocab.size() >= max_size) break;
    vocab.Add(entry.first);
  }
  return vocab;
}

CorpusReader::CorpusReader(const std::string &path, VocabPolicy policy)
    : file_(std::make_unique<std::ifstream>(path, std::ios::binary)),
      in_(file_.get()),
      source_(path),
      policy_(policy) {
  if (!*file_) throw DataError("cannot open " + path);
}

CorpusReader::CorpusReader(std::istream &in, std::string source_name,
                           VocabPolicy policy)
    : in_(&in), source_(std::move(source_name)), policy_(policy) {}

bool CorpusReader::Next(Sentence *sentence) {
  std::string line;
  if (!std::getline(*in_, line)) return false;
  ++lines_read_;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  try {
    *sentence = Tokenize(NormalizeUtf8(line));
  } catch (const std::invalid_argument &e) {
    throw ParseError(source_, lines_read_, e.what());
  }
  if (policy_.vocab != nullptr) {
    for (auto &token : *sentence) {
      if (!policy_.vocab->Contains(token)) token = std::string(kUnknown);
    }
  }
  return true;
}

std::vector<Sentence> ReadCorpus(const std::string &path, VocabPolicy policy) {
  CorpusReader reader(path, policy);
  std::vector<Sentence> corpus;
  Sentence s;
  while (reader.Next(&s)) corpus.push_back(std::move(s));
  return corpus;
}

std::vector<Sentence> ReadCorpus(std::istream &in,
                                 const std::string &source_name,
                                 VocabPolicy policy) {
  CorpusReader reader(in, source_name, policy);
  std::vector<Sentence> corpus;
  Sentence s;
  while (reader.Next(&s)) corpus.push_back(std::move(s));
  return corpus;
}

void WriteCorpus(std::span<const Sentence> corpus, std::ostream &out) {
  for (const auto &s : corpus) out << Join(s) << '\n';
}

std::vector<std::string> ReadLines(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

int ResolveThreads(int requested) {
  if (requested > 0) return requested;
  if (const char *env = std::getenv("CASCADE_THREADS")) {
    const int value = std::atoi(env);
    if (value > 0) return value;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace cascade
