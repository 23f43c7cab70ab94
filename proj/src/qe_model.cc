// src/qe_model.cc
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
// GP training with restarts, prediction, ranking and JSON serialization.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "cascade/errors.h"
#include "cascade/lbfgs.h"
#include "cascade/parallel.h"
#include "cascade/qe.h"

namespace cascade {
namespace {

double Variance(const Eigen::VectorXd &v) {
  if (v.size() == 0) return 0.0;
  return (v.array() - v.mean()).square().mean();
}

void CheckFinite(const Eigen::MatrixXd &x, const char *what) {
  if (!x.allFinite()) throw DataError(std::string(what) + " contains NaN or Inf");
}

}  // namespace

void ColumnMoments(const Eigen::MatrixXd &x, Eigen::VectorXd *mean,
                   Eigen::VectorXd *scale) {
  *mean = x.colwise().mean().transpose();
  *scale = ((x.rowwise() - mean->transpose()).array().square().colwise().mean())
               .sqrt()
               .transpose();
  for (Eigen::Index d = 0; d < scale->size(); ++d) {
    if (!((*scale)(d) > 0.0)) (*scale)(d) = 1.0;
  }
}

Eigen::MatrixXd GPModel::Standardize(const Eigen::MatrixXd &x) const {
  if (x.cols() != x_mean_.size()) {
    throw std::invalid_argument("expected " + std::to_string(x_mean_.size()) +
                                " features, got " + std::to_string(x.cols()));
  }
  return (x.rowwise() - x_mean_.transpose()).array().rowwise() /
         x_scale_.transpose().array();
}

GPModel GPModel::Fit(const Eigen::MatrixXd &x, const Eigen::VectorXd &y,
                     std::vector<std::string> feature_names,
                     const ArdHyperparameters<double> &hyper) {
  if (x.rows() < 1 || x.rows() != y.size()) throw std::invalid_argument("bad GP training data");
  if (static_cast<Eigen::Index>(feature_names.size()) != x.cols()) {
    throw std::invalid_argument("one name per feature column required");
  }
  CheckFinite(x, "feature matrix");
  CheckFinite(y, "target vector");
  GPModel model;
  model.names_ = std::move(feature_names);
  ColumnMoments(x, &model.x_mean_, &model.x_scale_);
  model.y_mean_ = y.mean();
  const double sd = std::sqrt(Variance(y));
  model.y_scale_ = sd > 0.0 ? sd : 1.0;
  const Eigen::MatrixXd xs = model.Standardize(x);
  const Eigen::VectorXd ys = (y.array() - model.y_mean_) / model.y_scale_;
  model.gp_ = GaussianProcess<double>(xs, ys, hyper);
  model.lml_ = LogMarginalLikelihood<double>(xs, ys, hyper);
  return model;
}

GPModel GPModel::Train(const Eigen::MatrixXd &x, const Eigen::VectorXd &y,
                       std::vector<std::string> feature_names,
                       const GPTrainOptions &options) {
  if (x.rows() < 2) throw std::invalid_argument("GP training needs at least two rows");
  if (x.rows() != y.size()) throw std::invalid_argument("X and y differ in rows");
  if (static_cast<std::size_t>(x.rows()) > options.max_rows) {
    throw std::invalid_argument("training set exceeds the dense GP cap of " +
                                std::to_string(options.max_rows) + " rows");
  }
  CheckFinite(x, "feature matrix");
  CheckFinite(y, "target vector");
  Eigen::VectorXd mean, scale;
  ColumnMoments(x, &mean, &scale);
  const double y_mean = y.mean();
  const double y_sd = std::sqrt(Variance(y));
  const Eigen::MatrixXd xs =
      (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
  const Eigen::VectorXd ys = (y.array() - y_mean) / (y_sd > 0.0 ? y_sd : 1.0);

  std::mt19937_64 rng(options.seed);
  Eigen::MatrixXd xo = xs;
  Eigen::VectorXd yo = ys;
  if (options.optimization_rows > 0 &&
      static_cast<std::size_t>(x.rows()) > options.optimization_rows) {
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(x.rows()));
    std::iota(rows.begin(), rows.end(), 0);
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(options.optimization_rows);
    std::sort(rows.begin(), rows.end());
    xo = xs(rows, Eigen::all);
    yo = ys(rows);
  }

  const Eigen::Index dim = x.cols();
  const double var_y = Variance(yo) > 0.0 ? Variance(yo) : 1.0;
  ArdHyperparameters<double> init;
  init.log_signal_variance = std::log(var_y);
  init.log_lengthscales = Eigen::VectorXd::Zero(dim);
  init.log_noise_variance = std::log(0.1 * var_y);

  const GPBounds bounds;
  Eigen::VectorXd lower(dim + 2), upper(dim + 2);
  lower << bounds.min_log_signal, Eigen::VectorXd::Constant(dim, bounds.min_log_lengthscale),
      bounds.min_log_noise;
  upper << bounds.max_log_signal, Eigen::VectorXd::Constant(dim, bounds.max_log_lengthscale),
      bounds.max_log_noise;

  // Minimize the negative log marginal likelihood per row.
  const double rows = static_cast<double>(xo.rows());
  auto objective = [&](const Eigen::VectorXd &theta, Eigen::VectorXd *grad) {
    try {
      const double value = LogMarginalLikelihood<double>(
          xo, yo, ArdHyperparameters<double>::Unpack(theta), grad);
      *grad = -*grad / rows;
      return -value / rows;
    } catch (const NotPositiveDefinite &) {
      return std::numeric_limits<double>::infinity();
    }
  };

  LbfgsOptions<double> lbfgs;
  lbfgs.max_iterations = options.max_iterations;
  std::normal_distribution<double> jitter(0.0, 1.0);
  Eigen::VectorXd best_theta = init.Pack();
  double best_value = std::numeric_limits<double>::infinity();
  for (int start = 0; start <= options.restarts; ++start) {
    Eigen::VectorXd theta = init.Pack();
    if (start > 0) {
      for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) += jitter(rng);
    }
    const auto result = MinimizeLbfgs<double>(objective, theta, lower, upper, lbfgs);
    if (result.value < best_value) {
      best_value = result.value;
      best_theta = result.x;
    }
  }
  if (!std::isfinite(best_value)) {
    throw NotPositiveDefinite("no hyperparameter start gave a positive definite kernel");
  }
  return Fit(x, y, std::move(feature_names), ArdHyperparameters<double>::Unpack(best_theta));
}

GPPrediction<double> GPModel::Predict(const Eigen::VectorXd &x) const {
  const Eigen::MatrixXd r = PredictBatch(x.transpose());
  return {r(0, 0), r(0, 1)};
}

Eigen::MatrixXd GPModel::PredictBatch(const Eigen::MatrixXd &x, int threads) const {
  CheckFinite(x, "feature matrix");
  const Eigen::MatrixXd xs = Standardize(x);
  Eigen::MatrixXd out(x.rows(), 2);
  constexpr Eigen::Index kBlock = 256;
  const auto blocks = static_cast<std::size_t>((x.rows() + kBlock - 1) / kBlock);
  ParallelFor(blocks, threads, [&](std::size_t b) {
    const Eigen::Index begin = static_cast<Eigen::Index>(b) * kBlock;
    const Eigen::Index len = std::min(kBlock, x.rows() - begin);
    out.middleRows(begin, len) = gp_.PredictMatrix(xs.middleRows(begin, len));
  });
  out.col(0) = out.col(0).array() * y_scale_ + y_mean_;
  out.col(1) *= y_scale_ * y_scale_;
  return out;
}

FeatureRanking GPModel::Rank() const {
  FeatureRanking ranking;
  const auto &l = gp_.hyperparameters().log_lengthscales;
  for (Eigen::Index d = 0; d < l.size(); ++d) {
    ranking.push_back({names_[static_cast<std::size_t>(d)], static_cast<std::size_t>(d),
                       std::exp(-l(d))});
  }
  std::stable_sort(ranking.begin(), ranking.end(),
                   [](const auto &a, const auto &b) { return a.relevance > b.relevance; });
  return ranking;
}

FeatureRanking SelectFeatures(const GPModel &model, std::size_t k) {
  const std::size_t dim = model.feature_names().size();
  if (k < 1 || k > dim) {
    throw std::invalid_argument("k must be in [1, " + std::to_string(dim) + "]");
  }
  FeatureRanking ranking = model.Rank();
  ranking.resize(k);
  return ranking;
}

nlohmann::json GPModel::ToJson() const {
  const auto &h = gp_.hyperparameters();
  auto vec = [](const Eigen::VectorXd &v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  nlohmann::json doc;
  doc["version"] = kFormatVersion;
  doc["kernel"] = "ard_rbf";
  doc["feature_names"] = names_;
  doc["x_mean"] = vec(x_mean_);
  doc["x_scale"] = vec(x_scale_);
  doc["y_mean"] = y_mean_;
  doc["y_scale"] = y_scale_;
  doc["log_signal_variance"] = h.log_signal_variance;
  doc["log_lengthscales"] = vec(h.log_lengthscales);
  doc["log_noise_variance"] = h.log_noise_variance;
  doc["log_marginal_likelihood"] = lml_;
  const Eigen::MatrixXd &xs = gp_.inputs();
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < xs.rows(); ++r) rows.push_back(vec(xs.row(r).transpose()));
  doc["train_x"] = std::move(rows);
  doc["alpha"] = vec(gp_.alpha());
  return doc;
}

GPModel GPModel::FromJson(const nlohmann::json &doc) {
  try {
    if (!doc.contains("version")) throw DataError("GP model: missing version field");
    if (doc.at("version").get<int>() != kFormatVersion) {
      throw DataError("GP model: unsupported version " + doc.at("version").dump());
    }
    auto vec = [&](const char *key) {
      const auto v = doc.at(key).get<std::vector<double>>();
      return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()));
    };
    GPModel model;
    model.names_ = doc.at("feature_names").get<std::vector<std::string>>();
    model.x_mean_ = vec("x_mean");
    model.x_scale_ = vec("x_scale");
    model.y_mean_ = doc.at("y_mean").get<double>();
    model.y_scale_ = doc.at("y_scale").get<double>();
    model.lml_ = doc.value("log_marginal_likelihood", 0.0);
    ArdHyperparameters<double> h;
    h.log_signal_variance = doc.at("log_signal_variance").get<double>();
    h.log_lengthscales = vec("log_lengthscales");
    h.log_noise_variance = doc.at("log_noise_variance").get<double>();
    const auto rows = doc.at("train_x").get<std::vector<std::vector<double>>>();
    const auto dim = static_cast<Eigen::Index>(model.names_.size());
    Eigen::MatrixXd xs(static_cast<Eigen::Index>(rows.size()), dim);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (static_cast<Eigen::Index>(rows[r].size()) != dim) {
        throw DataError("GP model: ragged train_x");
      }
      for (Eigen::Index c = 0; c < dim; ++c) xs(static_cast<Eigen::Index>(r), c) = rows[r][c];
    }
    if (model.x_mean_.size() != dim || model.x_scale_.size() != dim) {
      throw DataError("GP model: standardization size mismatch");
    }
    model.gp_ = GaussianProcess<double>::FromWeights(std::move(xs), vec("alpha"), h);
    return model;
  } catch (const nlohmann::json::exception &e) {
    throw DataError(std::string("GP model: ") + e.what());
  } catch (const std::invalid_argument &e) {
    throw DataError(std::string("GP model: ") + e.what());
  }
}

}  // namespace cascade
