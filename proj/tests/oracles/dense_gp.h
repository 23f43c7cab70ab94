// tests/oracles/dense_gp.h
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
// Textbook GP regression through an explicit matrix inverse, and a central
// finite-difference gradient. Test oracles only.

#ifndef CASCADE_TESTS_ORACLES_DENSE_GP_H_
#define CASCADE_TESTS_ORACLES_DENSE_GP_H_

#include <cmath>
#include <functional>

#include <Eigen/Dense>

namespace cascade::oracle {

struct DenseGp {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  double sf2 = 1, sn2 = 1;
  Eigen::VectorXd lengthscales;

  double Kernel(const Eigen::VectorXd &a, const Eigen::VectorXd &b) const {
    double s = 0;
    for (Eigen::Index d = 0; d < a.size(); ++d) {
      const double r = (a(d) - b(d)) / lengthscales(d);
      s += r * r;
    }
    return sf2 * std::exp(-0.5 * s);
  }

  Eigen::MatrixXd Covariance() const {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) k(i, j) = Kernel(x.row(i), x.row(j));
    }
    k.diagonal().array() += sn2;
    return k;
  }

  // {mean, variance including the noise term}
  std::pair<double, double> Predict(const Eigen::VectorXd &q) const {
    const Eigen::MatrixXd inv = Covariance().inverse();
    Eigen::VectorXd ks(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) ks(i) = Kernel(q, x.row(i));
    return {ks.dot(inv * y), sf2 + sn2 - ks.dot(inv * ks)};
  }

  double LogMarginalLikelihood() const {
    const Eigen::MatrixXd k = Covariance();
    const double log_det = std::log(k.determinant());
    return -0.5 * y.dot(k.inverse() * y) - 0.5 * log_det -
           0.5 * static_cast<double>(x.rows()) * std::log(2 * M_PI);
  }
};

inline Eigen::VectorXd CentralDifference(const std::function<double(const Eigen::VectorXd &)> &f,
                                         const Eigen::VectorXd &at, double step) {
  Eigen::VectorXd g(at.size());
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    Eigen::VectorXd hi = at, lo = at;
    hi(i) += step;
    lo(i) -= step;
    g(i) = (f(hi) - f(lo)) / (2 * step);
  }
  return g;
}

}  // namespace cascade::oracle

#endif  // CASCADE_TESTS_ORACLES_DENSE_GP_H_
