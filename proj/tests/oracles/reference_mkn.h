// tests/oracles/reference_mkn.h
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
// Brute-force interpolated modified Kneser-Ney estimator working on token
// strings. Written from the discount formulas alone; shares no code with the
// library so it can serve as an oracle.

#ifndef CASCADE_TESTS_ORACLES_REFERENCE_MKN_H_
#define CASCADE_TESTS_ORACLES_REFERENCE_MKN_H_

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace cascade::oracle {

using Tokens = std::vector<std::string>;

class ReferenceMkn {
 public:
  // `vocabulary` lists every word the model predicts, excluding the
  // sentence markers and the unknown word, which are always present.
  ReferenceMkn(const std::vector<Tokens> &corpus, int order, const std::set<std::string> &vocabulary)
      : order_(order), known_(vocabulary) {
    known_.insert("</s>");
    known_.insert("<unk>");
    raw_.resize(order + 1);
    for (const auto &sentence : corpus) {
      Tokens padded{"<s>"};
      for (const auto &w : sentence) padded.push_back(known_.count(w) ? w : "<unk>");
      padded.push_back("</s>");
      for (std::size_t i = 0; i < padded.size(); ++i) {
        for (int n = 1; n <= order && i + n <= padded.size(); ++n) {
          Tokens g(padded.begin() + i, padded.begin() + i + n);
          if (g == Tokens{"<s>"}) continue;
          raw_[n][g] += 1;
        }
      }
    }
    modified_.resize(order + 1);
    for (int n = 1; n <= order; ++n) {
      for (const auto &[g, c] : raw_[n]) {
        if (n == order || g.front() == "<s>") {
          modified_[n][g] = c;
          continue;
        }
        long distinct = 0;
        for (const auto &v : AllTokensWithStart()) {
          Tokens longer{v};
          longer.insert(longer.end(), g.begin(), g.end());
          if (raw_[n + 1].count(longer)) ++distinct;
        }
        modified_[n][g] = distinct;
      }
    }
    discounts_.resize(order + 1);
    histories_.resize(order + 1);
    for (int n = 1; n <= order; ++n) {
      discounts_[n] = Discount(modified_[n]);
      for (const auto &[g, c] : modified_[n]) {
        History &h = histories_[n][Tokens(g.begin(), g.end() - 1)];
        h.total += static_cast<double>(c);
        h.types[std::min<long>(c, 3) - 1] += 1;
        h.counts[g.back()] = c;
      }
    }
  }

  // p(w | context); the context is truncated to order - 1 tokens.
  double Prob(Tokens context, const std::string &word) const {
    if (word == "<s>") return 0.0;
    for (auto &t : context) {
      if (t != "<s>" && !known_.count(t)) t = "<unk>";
    }
    if (static_cast<int>(context.size()) > order_ - 1) {
      context.erase(context.begin(), context.end() - (order_ - 1));
    }
    return Level(static_cast<int>(context.size()) + 1, context,
                 known_.count(word) ? word : "<unk>");
  }

  // D1, D2, D3+ for order n.
  std::vector<double> Discounts(int n) const { return discounts_[n]; }

  std::size_t PredictableWords() const { return known_.size(); }

 private:
  std::vector<std::string> AllTokensWithStart() const {
    std::vector<std::string> all(known_.begin(), known_.end());
    all.push_back("<s>");
    return all;
  }

  static std::vector<double> Discount(const std::map<Tokens, long> &counts) {
    double n[5] = {0, 0, 0, 0, 0};
    for (const auto &[g, c] : counts) {
      if (c >= 1 && c <= 4) n[c] += 1;
    }
    const double y = n[1] + 2 * n[2] > 0 ? n[1] / (n[1] + 2 * n[2]) : 0.0;
    if (n[1] > 0 && n[2] > 0 && n[3] > 0 && n[4] > 0) {
      const double d1 = 1 - 2 * y * n[2] / n[1];
      const double d2 = 2 - 3 * y * n[3] / n[2];
      const double d3 = 3 - 4 * y * n[4] / n[3];
      if (d1 > 0 && d1 < 1 && d2 > 0 && d2 < 2 && d3 > 0 && d3 < 3) return {d1, d2, d3};
    }
    const double d = std::clamp(y, 0.01, 0.99);
    return {d, d, d};
  }

  double Level(int n, const Tokens &history, const std::string &word) const {
    if (n == 0) return 1.0 / static_cast<double>(known_.size());
    const Tokens shorter(history.begin() + (history.empty() ? 0 : 1), history.end());
    const double lower = Level(n - 1, shorter, word);
    auto it = histories_[n].find(history);
    if (it == histories_[n].end()) return lower;
    const History &h = it->second;
    auto found = h.counts.find(word);
    const long count = found == h.counts.end() ? 0 : found->second;
    const auto &d = discounts_[n];
    const double gamma = (d[0] * h.types[0] + d[1] * h.types[1] + d[2] * h.types[2]) / h.total;
    const double discount = count == 0 ? 0.0 : d[std::min<long>(count, 3) - 1];
    return std::max(static_cast<double>(count) - discount, 0.0) / h.total + gamma * lower;
  }

  struct History {
    double total = 0;
    double types[3] = {0, 0, 0};
    std::map<std::string, long> counts;
  };

  int order_;
  std::vector<std::map<Tokens, History>> histories_;
  std::set<std::string> known_;
  std::vector<std::map<Tokens, long>> raw_;
  std::vector<std::map<Tokens, long>> modified_;
  std::vector<std::vector<double>> discounts_;
};

}  // namespace cascade::oracle

#endif  // CASCADE_TESTS_ORACLES_REFERENCE_MKN_H_
