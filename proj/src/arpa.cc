// src/arpa.cc
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
// ARPA reader and writer.

#include "cascade/arpa.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include "cascade/errors.h"
#include "cascade/nbest.h"

namespace cascade {
namespace {

constexpr double kArpaLogZero = -99.0;

std::string FormatLog10(double natural_log) {
  if (!std::isfinite(natural_log) || natural_log / kLn10 <= kArpaLogZero) {
    return "-99";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", natural_log / kLn10);
  return buf;
}

double ParseLog10(std::string_view field, const std::string &source,
                  std::size_t line) {
  auto v = ParseDouble(field);
  if (!v || std::isnan(*v)) {
    throw ParseError(source, line, "non-numeric field '" + std::string(field) + "'");
  }
  if (*v <= kArpaLogZero) return -std::numeric_limits<double>::infinity();
  return *v * kLn10;
}

std::string Trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> SplitWs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

void WriteArpa(const NGramModel &model, std::ostream &out) {
  const Vocabulary &vocab = model.vocab();
  out << "\n\\data\\\n";
  for (int n = 1; n <= model.order(); ++n) {
    out << "ngram " << n << "=" << model.NumEntries(n) << "\n";
  }
  for (int n = 1; n <= model.order(); ++n) {
    out << "\n\\" << n << "-grams:\n";
    std::vector<std::pair<std::vector<std::string>, const NGramEntry *>> rows;
    rows.reserve(model.NumEntries(n));
    for (const auto &[ngram, entry] : model.table(n)) {
      std::vector<std::string> words;
      words.reserve(ngram.size());
      for (WordId w : ngram) words.push_back(vocab.Word(w));
      rows.emplace_back(std::move(words), &entry);
    }
    std::sort(rows.begin(), rows.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
    for (const auto &[words, entry] : rows) {
      out << FormatLog10(entry->log_prob) << '\t' << Join(words);
      if (n < model.order() && entry->log_backoff != 0.0) {
        out << '\t' << FormatLog10(entry->log_backoff);
      }
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

void WriteArpa(const NGramModel &model, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  WriteArpa(model, out);
  if (!out) throw DataError("write failed for " + path);
}

NGramModel ReadArpa(std::istream &in, const std::string &source) {
  std::string raw;
  std::size_t line_no = 0;
  auto next_nonblank = [&](std::string *line) {
    while (std::getline(in, raw)) {
      ++line_no;
      *line = Trim(raw);
      if (!line->empty()) return true;
    }
    return false;
  };

  std::string line;
  // Text before \data\ is ignored, as in the usual toolkits.
  bool found_data = false;
  while (next_nonblank(&line)) {
    if (line == "\\data\\") {
      found_data = true;
      break;
    }
  }
  if (!found_data) throw ParseError(source, line_no, "missing \\data\\ header");

  std::vector<std::size_t> declared;
  while (next_nonblank(&line)) {
    if (line.rfind("ngram ", 0) != 0) break;
    const auto eq = line.find('=');
    int n = 0;
    std::size_t count = 0;
    if (eq == std::string::npos ||
        std::sscanf(line.c_str() + 6, "%d", &n) != 1 ||
        !ParseDouble(Trim(line.substr(eq + 1))) ||
        n != static_cast<int>(declared.size()) + 1) {
      throw ParseError(source, line_no, "malformed count line '" + line + "'");
    }
    const auto c = ParseDouble(Trim(line.substr(eq + 1)));
    if (*c < 0 || std::floor(*c) != *c) {
      throw ParseError(source, line_no, "malformed count line '" + line + "'");
    }
    count = static_cast<std::size_t>(*c);
    declared.push_back(count);
  }
  if (declared.empty()) throw ParseError(source, line_no, "no ngram counts declared");
  const int order = static_cast<int>(declared.size());

  auto vocab = std::make_shared<Vocabulary>();
  std::vector<std::vector<std::pair<NGram, NGramEntry>>> sections(order);
  for (int n = 1; n <= order; ++n) {
    const std::string header = "\\" + std::to_string(n) + "-grams:";
    if (line != header) {
      throw ParseError(source, line_no, "expected " + header + ", found '" + line + "'");
    }
    bool more = false;
    while ((more = next_nonblank(&line))) {
      if (line.front() == '\\') break;
      auto fields = SplitWs(line);
      if (fields.size() != static_cast<std::size_t>(n) + 1 &&
          fields.size() != static_cast<std::size_t>(n) + 2) {
        throw ParseError(source, line_no,
                         "expected " + std::to_string(n) + " words in " + header);
      }
      NGramEntry entry;
      entry.log_prob = ParseLog10(fields[0], source, line_no);
      if (fields.size() == static_cast<std::size_t>(n) + 2) {
        if (n == order) {
          throw ParseError(source, line_no, "back-off weight on a top-order n-gram");
        }
        entry.log_backoff = ParseLog10(fields[n + 1], source, line_no);
      }
      NGram ngram;
      for (int k = 0; k < n; ++k) {
        const std::string word(fields[1 + k]);
        if (n == 1) {
          ngram.push_back(vocab->Add(word));
        } else {
          if (!vocab->Contains(word)) {
            throw ParseError(source, line_no, "word '" + word + "' has no unigram");
          }
          ngram.push_back(vocab->Find(word));
        }
      }
      sections[n - 1].emplace_back(std::move(ngram), entry);
    }
    if (sections[n - 1].size() != declared[n - 1]) {
      throw ParseError(source, line_no,
                       header + " has " + std::to_string(sections[n - 1].size()) +
                           " entries but ngram " + std::to_string(n) + "=" +
                           std::to_string(declared[n - 1]) + " was declared");
    }
    if (!more) throw ParseError(source, line_no, "missing \\end\\");
  }
  if (line != "\\end\\") {
    throw ParseError(source, line_no, "expected \\end\\, found '" + line + "'");
  }

  NGramModel model(order, std::move(vocab));
  for (int n = 1; n <= order; ++n) {
    auto &table = model.mutable_table(n);
    table.reserve(sections[n - 1].size());
    for (auto &[ngram, entry] : sections[n - 1]) {
      if (!table.emplace(std::move(ngram), entry).second) {
        throw ParseError(source, line_no, "duplicate entry in \\" +
                                              std::to_string(n) + "-grams:");
      }
    }
  }
  return model;
}

NGramModel ReadArpa(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return ReadArpa(in, path);
}

}  // namespace cascade
