// src/lm_eval.cc
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
// Entropy measures and interpolation.

#include "cascade/lm_eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Core>

#include "cascade/parallel.h"

namespace cascade {
namespace {

constexpr double kLog2Of10 = 3.32192809488736234787;

}  // namespace

double CrossEntropy(const LanguageModel &lm, const Sentence &sentence) {
  const auto probs = lm.SentenceLog10Probs(sentence);
  double sum = 0.0;
  for (double p : probs) sum += p;
  return -sum * kLog2Of10 / static_cast<double>(probs.size());
}

double CorpusEntropy::bits_per_word() const {
  if (events == 0) return 0.0;
  return -log10_prob * kLog2Of10 / static_cast<double>(events);
}

double CorpusEntropy::perplexity() const {
  if (events == 0) return 1.0;
  return std::pow(10.0, -log10_prob / static_cast<double>(events));
}

CorpusEntropy ScoreCorpus(const LanguageModel &lm, std::span<const Sentence> corpus,
                          int threads) {
  std::vector<double> sums(corpus.size(), 0.0);
  ParallelFor(corpus.size(), threads, [&](std::size_t i) {
    double s = 0.0;
    for (double p : lm.SentenceLog10Probs(corpus[i])) s += p;
    sums[i] = s;
  });
  CorpusEntropy result;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    result.log10_prob += sums[i];
    result.events += corpus[i].size() + 1;
  }
  return result;
}

double Perplexity(const LanguageModel &lm, std::span<const Sentence> corpus,
                  int threads) {
  return ScoreCorpus(lm, corpus, threads).perplexity();
}

InterpolatedModel::InterpolatedModel(
    std::vector<std::shared_ptr<const LanguageModel>> components,
    std::vector<double> weights)
    : components_(std::move(components)), weights_(std::move(weights)) {
  if (components_.empty() || components_.size() != weights_.size()) {
    throw std::invalid_argument("one weight per component required");
  }
}

int InterpolatedModel::order() const {
  int order = 0;
  for (const auto &c : components_) order = std::max(order, c->order());
  return order;
}

std::vector<double> InterpolatedModel::SentenceLog10Probs(const Sentence &sentence) const {
  std::vector<double> mixed(sentence.size() + 1, 0.0);
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto probs = components_[k]->SentenceLog10Probs(sentence);
    for (std::size_t t = 0; t < mixed.size(); ++t) {
      mixed[t] += weights_[k] * std::pow(10.0, probs[t]);
    }
  }
  for (double &p : mixed) p = std::log10(p);
  return mixed;
}

InterpolationResult EstimateInterpolation(
    std::span<const LanguageModel *const> components,
    std::span<const Sentence> dev, const InterpolationOptions &options) {
  const std::size_t k = components.size();
  if (k < 2) throw std::invalid_argument("interpolation needs at least two models");
  std::size_t events = 0;
  std::vector<std::size_t> offsets(dev.size());
  for (std::size_t i = 0; i < dev.size(); ++i) {
    offsets[i] = events;
    events += dev[i].size() + 1;
  }
  if (dev.empty()) throw std::invalid_argument("empty dev corpus");

  // probs(t, j) = p_j(w_t | h_t)
  Eigen::MatrixXd probs(events, k);
  ParallelFor(dev.size(), options.threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto lp = components[j]->SentenceLog10Probs(dev[i]);
      for (std::size_t t = 0; t < lp.size(); ++t) {
        probs(offsets[i] + t, j) = std::pow(10.0, lp[t]);
      }
    }
  });

  InterpolationResult result;
  std::vector<Eigen::Index> rows;
  rows.reserve(events);
  for (Eigen::Index t = 0; t < probs.rows(); ++t) {
    if (probs.row(t).maxCoeff() > 0.0) {
      rows.push_back(t);
    } else {
      ++result.skipped_events;
    }
  }
  Eigen::MatrixXd p = probs(rows, Eigen::all);
  if (p.rows() == 0) throw std::invalid_argument("no dev event has nonzero probability");

  Eigen::VectorXd lambda = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
  auto log_likelihood = [&](const Eigen::VectorXd &l) {
    return (p * l).array().log().sum();
  };
  result.log_likelihood.push_back(log_likelihood(lambda));
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd mix = p * lambda;
    // Mean posterior responsibility of each component.
    Eigen::VectorXd next =
        (p.array().colwise() / mix.array()).colwise().mean().transpose().matrix().cwiseProduct(
            lambda);
    next /= next.sum();
    const double change = (next - lambda).cwiseAbs().maxCoeff();
    lambda = next;
    result.iterations = it + 1;
    result.log_likelihood.push_back(log_likelihood(lambda));
    if (change < options.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.weights.assign(lambda.data(), lambda.data() + k);
  return result;
}

}  // namespace cascade
