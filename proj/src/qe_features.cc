// src/qe_features.cc
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
// Sentence-level QE features and the feature file format.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "cascade/errors.h"
#include "cascade/qe.h"

namespace cascade {
namespace {

constexpr double kLog10Floor = -99.0;

bool IsPunctuation(const std::string &token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), [](char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
  });
}

bool IsNumeric(const std::string &token) {
  std::size_t i = 0;
  if (i < token.size() && (token[i] == '+' || token[i] == '-')) ++i;
  if (i >= token.size() || !std::isdigit(static_cast<unsigned char>(token[i]))) {
    return false;
  }
  for (; i < token.size(); ++i) {
    const char c = token[i];
    if (!std::isdigit(static_cast<unsigned char>(c)) && c != '.' && c != ',') {
      return false;
    }
  }
  return true;
}

}  // namespace

const std::vector<std::string> &QeFeatureNames() {
  static const std::vector<std::string> names = {
      "token_count",
      "mean_token_length",
      "lm_log10_prob",
      "lm_log10_prob_per_word",
      "lm_perplexity",
      "freq_quartile1_fraction",
      "freq_quartile2_fraction",
      "freq_quartile3_fraction",
      "freq_quartile4_fraction",
      "bigram_seen_fraction",
      "trigram_seen_fraction",
      "type_token_ratio",
      "oov_fraction",
      "punctuation_fraction",
      "numeric_fraction",
      "asr_acoustic_per_word",
      "asr_lm_per_word",
      "asr_total_per_word",
      "asr_confidence",
      "nbest_rank",
      "score_margin_to_best",
  };
  return names;
}

FeatureExtractor::FeatureExtractor(const NGramModel &source_lm,
                                   const CountTable &training_counts)
    : lm_(source_lm), counts_(training_counts) {
  // Word types sorted by training frequency (ascending, ties by spelling),
  // split into four equal-size bins; bin 1 holds the rarest words.
  std::vector<std::pair<std::int64_t, const std::string *>> types;
  for (const auto &[ngram, c] : counts_.raw.at(0)) {
    if (ngram[0] == Vocabulary::kEndId) continue;
    types.emplace_back(c, &counts_.vocab->Word(ngram[0]));
  }
  std::sort(types.begin(), types.end(), [](const auto &a, const auto &b) {
    return a.first != b.first ? a.first < b.first : *a.second < *b.second;
  });
  for (std::size_t r = 0; r < types.size(); ++r) {
    const int q = 1 + static_cast<int>((4 * r) / types.size());
    quartile_[counts_.vocab->Find(*types[r].second)] = q;
  }
}

Eigen::VectorXd FeatureExtractor::Extract(const Hypothesis &h, double best_total) const {
  const auto &tokens = h.tokens;
  const double count = static_cast<double>(tokens.size());
  const double per = std::max(1.0, count);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(QeFeatureNames().size()));

  f(0) = count;
  double chars = 0.0;
  for (const auto &t : tokens) chars += static_cast<double>(Utf8Length(t));
  f(1) = tokens.empty() ? 0.0 : chars / count;

  double log10_prob = 0.0;
  for (double lp : lm_.SentenceLog10Probs(tokens)) log10_prob += std::max(lp, kLog10Floor);
  const double events = count + 1.0;
  f(2) = log10_prob;
  f(3) = log10_prob / events;
  f(4) = std::pow(10.0, -log10_prob / events);

  const Vocabulary &train_vocab = *counts_.vocab;
  std::array<double, 4> quartiles{};
  for (const auto &t : tokens) {
    if (!train_vocab.Contains(t)) continue;
    auto it = quartile_.find(train_vocab.Find(t));
    if (it != quartile_.end()) quartiles[it->second - 1] += 1.0;
  }
  for (int q = 0; q < 4; ++q) f(5 + q) = tokens.empty() ? 0.0 : quartiles[q] / count;

  for (int n = 2; n <= 3; ++n) {
    if (tokens.size() < static_cast<std::size_t>(n)) continue;
    const double total = static_cast<double>(tokens.size() - n + 1);
    double seen = 0.0;
    if (counts_.order >= n) {
      NGram key;
      for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        key.clear();
        for (int k = 0; k < n; ++k) key.push_back(train_vocab.Find(tokens[i + k]));
        if (counts_.raw[n - 1].count(key)) seen += 1.0;
      }
    }
    f(9 + (n - 2)) = seen / total;
  }

  if (!tokens.empty()) {
    std::set<std::string> types(tokens.begin(), tokens.end());
    f(11) = static_cast<double>(types.size()) / count;
    double oov = 0.0, punct = 0.0, numeric = 0.0;
    for (const auto &t : tokens) {
      if (!lm_.vocab().Contains(t)) oov += 1.0;
      if (IsPunctuation(t)) punct += 1.0;
      if (IsNumeric(t)) numeric += 1.0;
    }
    f(12) = oov / count;
    f(13) = punct / count;
    f(14) = numeric / count;
  }

  f(15) = h.acoustic / per;
  f(16) = h.lm / per;
  f(17) = h.total / per;
  f(18) = h.confidence;
  f(19) = h.rank;
  f(20) = best_total - h.total;
  return f;
}

Eigen::MatrixXd FeatureExtractor::Extract(const NBestList &list) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(list.size()),
                      static_cast<Eigen::Index>(QeFeatureNames().size()));
  const double best = list.best().total;
  for (std::size_t i = 0; i < list.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = Extract(list.hypotheses[i], best).transpose();
  }
  return out;
}

std::string FeatureKey(const std::string &utt_id, int rank) {
  return utt_id + ":" + std::to_string(rank);
}

Eigen::Index FeatureTable::Find(const std::string &key) const {
  auto it = std::find(keys.begin(), keys.end(), key);
  return it == keys.end() ? -1 : static_cast<Eigen::Index>(it - keys.begin());
}

FeatureTable FeatureTable::SelectColumns(const std::vector<std::size_t> &columns) const {
  FeatureTable out;
  out.keys = keys;
  out.values.resize(values.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out.names.push_back(names.at(columns[c]));
    out.values.col(static_cast<Eigen::Index>(c)) =
        values.col(static_cast<Eigen::Index>(columns[c]));
  }
  return out;
}

void WriteFeatureTable(const FeatureTable &table, std::ostream &out) {
  out << "key";
  for (const auto &n : table.names) out << '\t' << n;
  out << '\n';
  for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
    out << table.keys[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
      out << '\t' << FormatDouble(table.values(r, c));
    }
    out << '\n';
  }
}

FeatureTable ReadFeatureTable(std::istream &in, const std::string &source) {
  FeatureTable table;
  std::string line;
  std::size_t line_no = 0;
  auto split = [](const std::string &l) {
    std::vector<std::string> fields;
    std::stringstream ss(l);
    std::string f;
    while (std::getline(ss, f, '\t')) fields.push_back(f);
    return fields;
  };
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing header");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split(line);
  if (header.size() < 2 || header[0] != "key") {
    throw ParseError(source, line_no, "header must start with 'key'");
  }
  table.names.assign(header.begin() + 1, header.end());
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != header.size()) {
      throw ParseError(source, line_no, "expected " + std::to_string(header.size()) +
                                            " fields, found " +
                                            std::to_string(fields.size()));
    }
    std::vector<double> row;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      auto v = ParseDouble(fields[i]);
      if (!v || !std::isfinite(*v)) {
        throw ParseError(source, line_no, "non-finite value for " + header[i]);
      }
      row.push_back(*v);
    }
    table.keys.push_back(fields[0]);
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return table;
}

}  // namespace cascade
