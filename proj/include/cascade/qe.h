// include/cascade/qe.h
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
// Quality estimation: sentence features from ASR hypotheses, a GP regressor
// on standardized features, and ARD-based feature ranking.

#ifndef CASCADE_QE_H_
#define CASCADE_QE_H_

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "cascade/gaussian_process.h"
#include "cascade/nbest.h"
#include "cascade/ngram.h"
#include "json.hpp"

namespace cascade {

// Names of the features produced by FeatureExtractor, in column order.
const std::vector<std::string> &QeFeatureNames();

class FeatureExtractor {
 public:
  // `training_counts` supplies unigram frequency quartiles and the seen
  // bigram/trigram sets; `source_lm` the LM scores and the OOV test.
  FeatureExtractor(const NGramModel &source_lm, const CountTable &training_counts);

  // `best_total` is the total score of the rank-1 hypothesis in the list.
  // An empty hypothesis yields zero counts and fractions, with LM scores
  // for the lone </s> event.
  Eigen::VectorXd Extract(const Hypothesis &hypothesis, double best_total) const;
  Eigen::MatrixXd Extract(const NBestList &list) const;

 private:
  const NGramModel &lm_;
  const CountTable &counts_;
  std::unordered_map<WordId, int> quartile_;  // training word -> 1..4
};

// Feature file: header `key\t<names>`, one row per hypothesis keyed by
// `utt_id:rank`.
struct FeatureTable {
  std::vector<std::string> names;
  std::vector<std::string> keys;
  Eigen::MatrixXd values;  // rows follow keys

  Eigen::Index Find(const std::string &key) const;  // -1 when absent
  FeatureTable SelectColumns(const std::vector<std::size_t> &columns) const;
};

std::string FeatureKey(const std::string &utt_id, int rank);

void WriteFeatureTable(const FeatureTable &table, std::ostream &out);
// Throws ParseError on ragged rows or non-finite values.
FeatureTable ReadFeatureTable(std::istream &in, const std::string &source_name);

struct FeatureRelevance {
  std::string name;
  std::size_t index = 0;   // column in the model's input
  double relevance = 0.0;  // 1 / lengthscale
};

using FeatureRanking = std::vector<FeatureRelevance>;

struct GPTrainOptions {
  int restarts = 3;             // random restarts besides the default start
  int max_iterations = 100;     // per L-BFGS run
  // Hyperparameters are fitted on at most this many rows (random subset);
  // the final posterior always uses every row. 0 means no subsetting.
  std::size_t optimization_rows = 1000;
  std::size_t max_rows = 10000;  // dense GP cap
  std::uint64_t seed = 17;
};

// Lower/upper bounds on the log hyperparameters during optimization.
struct GPBounds {
  double min_log_signal = std::log(1e-4), max_log_signal = std::log(1e4);
  double min_log_lengthscale = std::log(1e-2), max_log_lengthscale = std::log(1e3);
  double min_log_noise = std::log(1e-6), max_log_noise = std::log(1e1);
};

// GP regressor on standardized inputs and targets. Constant columns (and a
// constant target) get unit scale.
class GPModel {
 public:
  static constexpr int kFormatVersion = 1;

  static GPModel Train(const Eigen::MatrixXd &x, const Eigen::VectorXd &y,
                       std::vector<std::string> feature_names,
                       const GPTrainOptions &options = {});

  // Posterior from given hyperparameters (in standardized space) without
  // optimization.
  static GPModel Fit(const Eigen::MatrixXd &x, const Eigen::VectorXd &y,
                     std::vector<std::string> feature_names,
                     const ArdHyperparameters<double> &hyper);

  // De-standardized predictive mean and variance.
  GPPrediction<double> Predict(const Eigen::VectorXd &x) const;
  // Column 0 mean, column 1 variance.
  Eigen::MatrixXd PredictBatch(const Eigen::MatrixXd &x, int threads = 1) const;

  // Features by 1 / lengthscale, descending; ties keep column order.
  FeatureRanking Rank() const;

  const std::vector<std::string> &feature_names() const { return names_; }
  const GaussianProcess<double> &gp() const { return gp_; }
  double log_marginal_likelihood() const { return lml_; }
  double y_mean() const { return y_mean_; }
  double y_scale() const { return y_scale_; }
  const Eigen::VectorXd &x_mean() const { return x_mean_; }
  const Eigen::VectorXd &x_scale() const { return x_scale_; }

  Eigen::MatrixXd Standardize(const Eigen::MatrixXd &x) const;

  nlohmann::json ToJson() const;
  static GPModel FromJson(const nlohmann::json &doc);

 private:
  std::vector<std::string> names_;
  Eigen::VectorXd x_mean_, x_scale_;
  double y_mean_ = 0.0, y_scale_ = 1.0;
  GaussianProcess<double> gp_;
  double lml_ = 0.0;
};

// Top `k` of the ranking, 1 <= k <= number of features.
FeatureRanking SelectFeatures(const GPModel &model, std::size_t k);

// Column standardization helpers, exposed for tests.
void ColumnMoments(const Eigen::MatrixXd &x, Eigen::VectorXd *mean,
                   Eigen::VectorXd *scale);

}  // namespace cascade

#endif  // CASCADE_QE_H_
