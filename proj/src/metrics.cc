// src/metrics.cc
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
// Edit-distance and n-gram precision metrics.

#include "cascade/metrics.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "cascade/errors.h"

namespace cascade {

double WerReport::wer() const {
  if (reference_length == 0) {
    return errors() == 0 ? 0.0 : static_cast<double>(errors());
  }
  return static_cast<double>(errors()) / static_cast<double>(reference_length);
}

WerReport &WerReport::operator+=(const WerReport &other) {
  substitutions += other.substitutions;
  deletions += other.deletions;
  insertions += other.insertions;
  reference_length += other.reference_length;
  empty_reference = empty_reference || other.empty_reference;
  return *this;
}

WerReport Wer(std::span<const std::string> ref, std::span<const std::string> hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  std::vector<std::size_t> cost((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t & {
    return cost[i * (m + 1) + j];
  };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }
  WerReport report;
  report.reference_length = n;
  report.empty_reference = n == 0 && m > 0;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        if (!same) ++report.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++report.deletions;
      --i;
    } else {
      ++report.insertions;
      --j;
    }
  }
  return report;
}

WerReport CorpusWer(std::span<const Sentence> references,
                    std::span<const Sentence> hypotheses) {
  if (references.size() != hypotheses.size()) {
    throw StructuralError("reference has " + std::to_string(references.size()) +
                          " lines but hypothesis has " +
                          std::to_string(hypotheses.size()));
  }
  WerReport total;
  for (std::size_t i = 0; i < references.size(); ++i) {
    WerReport r = Wer(references[i], hypotheses[i]);
    r.empty_reference = false;
    total += r;
  }
  total.empty_reference = total.reference_length == 0 && total.errors() > 0;
  return total;
}

BleuStats &BleuStats::operator+=(const BleuStats &other) {
  for (std::size_t k = 0; k < matches.size(); ++k) {
    matches[k] += other.matches[k];
    totals[k] += other.totals[k];
  }
  hyp_length += other.hyp_length;
  ref_length += other.ref_length;
  return *this;
}

BleuStats ComputeBleuStats(std::span<const std::string> ref,
                           std::span<const std::string> hyp, int max_order) {
  BleuStats stats(max_order);
  stats.hyp_length = hyp.size();
  stats.ref_length = ref.size();
  for (int n = 1; n <= max_order; ++n) {
    std::map<std::vector<std::string>, std::size_t> ref_counts;
    for (std::size_t i = 0; i + n <= ref.size(); ++i) {
      ++ref_counts[std::vector<std::string>(ref.begin() + i, ref.begin() + i + n)];
    }
    std::map<std::vector<std::string>, std::size_t> hyp_counts;
    for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
      ++hyp_counts[std::vector<std::string>(hyp.begin() + i, hyp.begin() + i + n)];
    }
    for (const auto &[gram, c] : hyp_counts) {
      stats.totals[n - 1] += c;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) stats.matches[n - 1] += std::min(c, it->second);
    }
  }
  return stats;
}

BleuReport BleuFromStats(const BleuStats &stats) {
  BleuReport report;
  const std::size_t orders = stats.matches.size();
  double log_sum = 0.0;
  bool zero = false;
  for (std::size_t k = 0; k < orders; ++k) {
    const double p = stats.totals[k] == 0
                         ? 0.0
                         : static_cast<double>(stats.matches[k]) /
                               static_cast<double>(stats.totals[k]);
    report.precisions.push_back(p);
    if (p == 0.0) {
      zero = true;
      if (report.diagnostic.empty()) {
        report.diagnostic = "no matching " + std::to_string(k + 1) + "-grams";
      }
    } else {
      log_sum += std::log(p);
    }
  }
  if (stats.hyp_length > 0 && stats.hyp_length < stats.ref_length) {
    report.brevity_penalty =
        std::exp(1.0 - static_cast<double>(stats.ref_length) /
                           static_cast<double>(stats.hyp_length));
  }
  if (stats.hyp_length == 0) {
    report.diagnostic = "empty hypothesis";
    report.bleu = 0.0;
  } else if (zero) {
    report.bleu = 0.0;
  } else {
    report.bleu = 100.0 * report.brevity_penalty *
                  std::exp(log_sum / static_cast<double>(orders));
  }
  return report;
}

BleuReport Bleu(std::span<const Sentence> references,
                std::span<const Sentence> hypotheses, int max_order,
                bool per_sentence) {
  if (references.size() != hypotheses.size()) {
    throw StructuralError("reference has " + std::to_string(references.size()) +
                          " lines but hypothesis has " +
                          std::to_string(hypotheses.size()));
  }
  BleuStats total(max_order);
  std::vector<double> sentences;
  for (std::size_t i = 0; i < references.size(); ++i) {
    total += ComputeBleuStats(references[i], hypotheses[i], max_order);
    if (per_sentence) {
      sentences.push_back(SentenceBleu(references[i], hypotheses[i], max_order));
    }
  }
  BleuReport report = BleuFromStats(total);
  report.sentence_bleu = std::move(sentences);
  return report;
}

double SentenceBleu(std::span<const std::string> reference,
                    std::span<const std::string> hypothesis, int max_order) {
  if (hypothesis.empty()) return 0.0;
  const BleuStats stats = ComputeBleuStats(reference, hypothesis, max_order);
  if (stats.matches[0] == 0) return 0.0;
  double log_sum = std::log(static_cast<double>(stats.matches[0]) /
                            static_cast<double>(stats.totals[0]));
  for (int k = 1; k < max_order; ++k) {
    double m = static_cast<double>(stats.matches[k]);
    double t = static_cast<double>(stats.totals[k]);
    if (stats.matches[k] == 0) {
      m += 1.0;
      t += 1.0;
    }
    log_sum += std::log(m / t);
  }
  double bp = 1.0;
  if (hypothesis.size() < reference.size()) {
    bp = std::exp(1.0 - static_cast<double>(reference.size()) /
                            static_cast<double>(hypothesis.size()));
  }
  return 100.0 * bp * std::exp(log_sum / static_cast<double>(max_order));
}

Sentence Lowercase(const Sentence &sentence) {
  Sentence out = sentence;
  for (auto &token : out) {
    for (char &c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace cascade
