// include/cascade/gaussian_process.h
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
// Exact Gaussian-process regression with an ARD squared-exponential kernel
//
//   k(x, x') = sf2 * exp(-1/2 sum_d (x_d - x'_d)^2 / l_d^2)
//
// plus i.i.d. noise sn2. Hyperparameters are handled in log space as
// theta = [log sf2, log l_1 .. log l_F, log sn2].

#ifndef CASCADE_GAUSSIAN_PROCESS_H_
#define CASCADE_GAUSSIAN_PROCESS_H_

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace cascade {

class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
struct ArdHyperparameters {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Scalar log_signal_variance = 0;
  Vector log_lengthscales;
  Scalar log_noise_variance = 0;

  Eigen::Index dim() const { return log_lengthscales.size(); }
  Scalar signal_variance() const { return std::exp(log_signal_variance); }
  Scalar noise_variance() const { return std::exp(log_noise_variance); }

  Vector Pack() const {
    Vector theta(dim() + 2);
    theta << log_signal_variance, log_lengthscales, log_noise_variance;
    return theta;
  }
  static ArdHyperparameters Unpack(const Vector &theta) {
    ArdHyperparameters h;
    h.log_signal_variance = theta(0);
    h.log_lengthscales = theta.segment(1, theta.size() - 2);
    h.log_noise_variance = theta(theta.size() - 1);
    return h;
  }
};

// Noise-free kernel between the rows of `a` and the rows of `b`.
template <typename Scalar, typename DerivedA, typename DerivedB>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> ArdKernel(
    const Eigen::MatrixBase<DerivedA> &a, const Eigen::MatrixBase<DerivedB> &b,
    const ArdHyperparameters<Scalar> &h) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> inv_l =
      (-h.log_lengthscales.array()).exp().matrix().transpose();
  const Matrix sa = a.array().rowwise() * inv_l.array();
  const Matrix sb = b.array().rowwise() * inv_l.array();
  Matrix sq = (-2 * sa * sb.transpose()).eval();
  sq.colwise() += sa.rowwise().squaredNorm();
  sq.rowwise() += sb.rowwise().squaredNorm().transpose();
  return h.signal_variance() * (Scalar(-0.5) * sq.array().max(Scalar(0))).exp().matrix();
}

// Cholesky of K + (sn2 + jitter) I with jitter escalating from
// 1e-10 sf2 to 1e-6 sf2. Throws NotPositiveDefinite when all attempts fail.
template <typename Scalar>
Eigen::LLT<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> FactorizeKernel(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> &kernel,
    const ArdHyperparameters<Scalar> &h, Scalar *jitter_used = nullptr) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Scalar sf2 = h.signal_variance();
  Scalar jitter = 0;
  for (int attempt = 0; attempt < 6; ++attempt) {
    Matrix ky = kernel;
    ky.diagonal().array() += h.noise_variance() + jitter;
    Eigen::LLT<Matrix> llt(ky);
    if (llt.info() == Eigen::Success) {
      if (jitter_used != nullptr) *jitter_used = jitter;
      return llt;
    }
    jitter = attempt == 0 ? Scalar(1e-10) * sf2 : jitter * 10;
  }
  throw NotPositiveDefinite("kernel matrix not positive definite after jitter");
}

// Log marginal likelihood
//   L = -1/2 y^T alpha - 1/2 log|K + sn2 I| - n/2 log(2 pi)
// and, when `gradient` is given, dL/dtheta from
//   dL/dtheta = 1/2 tr((alpha alpha^T - (K + sn2 I)^-1) dK/dtheta).
template <typename Scalar>
Scalar LogMarginalLikelihood(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> &x,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &y,
    const ArdHyperparameters<Scalar> &h,
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> *gradient = nullptr) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = x.rows();
  const Matrix kf = ArdKernel<Scalar>(x, x, h);
  const auto llt = FactorizeKernel<Scalar>(kf, h);
  const Vector alpha = llt.solve(y);
  const Matrix &l = llt.matrixL();
  const Scalar log_det = 2 * l.diagonal().array().log().sum();
  const Scalar value = Scalar(-0.5) * y.dot(alpha) - Scalar(0.5) * log_det -
                       Scalar(0.5) * n * std::log(2 * std::numbers::pi_v<Scalar>);
  if (gradient != nullptr) {
    const Matrix inv = llt.solve(Matrix::Identity(n, n));
    const Matrix w = alpha * alpha.transpose() - inv;
    const Matrix m = w.cwiseProduct(kf);
    gradient->resize(h.dim() + 2);
    (*gradient)(0) = Scalar(0.5) * m.sum();
    // sum_ij m_ij (x_id - x_jd)^2 = 2 sum_i x_id^2 r_i - 2 x_d^T m x_d
    const Vector r = m.rowwise().sum();
    const Matrix mx = m * x;
    for (Eigen::Index d = 0; d < h.dim(); ++d) {
      const Scalar quad = 2 * x.col(d).array().square().matrix().dot(r) -
                          2 * x.col(d).dot(mx.col(d));
      (*gradient)(1 + d) =
          Scalar(0.5) * quad * std::exp(-2 * h.log_lengthscales(d));
    }
    (*gradient)(h.dim() + 1) = Scalar(0.5) * h.noise_variance() * w.trace();
  }
  return value;
}

template <typename Scalar>
struct GPPrediction {
  Scalar mean = 0;
  Scalar variance = 0;
};

// GP posterior conditioned on fixed training data and hyperparameters.
template <typename Scalar>
class GaussianProcess {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  GaussianProcess() = default;

  GaussianProcess(Matrix x, const Vector &y, ArdHyperparameters<Scalar> h)
      : x_(std::move(x)), hyper_(std::move(h)) {
    if (x_.rows() != y.size()) throw std::invalid_argument("X and y differ in rows");
    if (hyper_.dim() != x_.cols()) throw std::invalid_argument("lengthscale count mismatch");
    llt_ = FactorizeKernel<Scalar>(ArdKernel<Scalar>(x_, x_, hyper_), hyper_, &jitter_);
    alpha_ = llt_.solve(y);
  }

  // Rebuilds from a stored weight vector; the factorization is recomputed.
  static GaussianProcess FromWeights(Matrix x, Vector alpha,
                                     ArdHyperparameters<Scalar> h) {
    GaussianProcess gp;
    gp.x_ = std::move(x);
    gp.alpha_ = std::move(alpha);
    gp.hyper_ = std::move(h);
    if (gp.alpha_.size() != gp.x_.rows() || gp.hyper_.dim() != gp.x_.cols()) {
      throw std::invalid_argument("inconsistent GP dimensions");
    }
    gp.llt_ = FactorizeKernel<Scalar>(ArdKernel<Scalar>(gp.x_, gp.x_, gp.hyper_),
                                      gp.hyper_, &gp.jitter_);
    return gp;
  }

  // mean = k*^T alpha, variance = k(x, x) - k*^T (K + sn2 I)^-1 k* + sn2.
  Matrix PredictMatrix(const Matrix &queries) const {
    const Matrix ks = ArdKernel<Scalar>(queries, x_, hyper_);
    Matrix out(queries.rows(), 2);
    out.col(0) = ks * alpha_;
    const Matrix v = llt_.matrixL().solve(ks.transpose());
    out.col(1) = (hyper_.signal_variance() + hyper_.noise_variance() -
                  v.colwise().squaredNorm().transpose().array())
                     .max(Scalar(0))
                     .matrix();
    return out;
  }

  GPPrediction<Scalar> Predict(const Vector &query) const {
    const Matrix r = PredictMatrix(query.transpose());
    return {r(0, 0), r(0, 1)};
  }

  const Matrix &inputs() const { return x_; }
  const Vector &alpha() const { return alpha_; }
  const ArdHyperparameters<Scalar> &hyperparameters() const { return hyper_; }
  Scalar jitter() const { return jitter_; }

 private:
  Matrix x_;
  Vector alpha_;
  ArdHyperparameters<Scalar> hyper_;
  Eigen::LLT<Matrix> llt_;
  Scalar jitter_ = 0;
};

}  // namespace cascade

#endif  // CASCADE_GAUSSIAN_PROCESS_H_
