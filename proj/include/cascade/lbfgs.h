// include/cascade/lbfgs.h
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
// Limited-memory BFGS minimizer with a backtracking Armijo line search and
// box clamping.

#ifndef CASCADE_LBFGS_H_
#define CASCADE_LBFGS_H_

#include <cmath>
#include <deque>
#include <vector>
#include <limits>

#include <Eigen/Core>

namespace cascade {

template <typename Scalar>
struct LbfgsOptions {
  int max_iterations = 100;
  int memory = 8;
  Scalar gradient_tolerance = Scalar(1e-5);  // on the max-norm
  Scalar function_tolerance = Scalar(1e-9);  // relative decrease
  int max_line_search_steps = 30;
};

template <typename Scalar>
struct LbfgsResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  Scalar value = std::numeric_limits<Scalar>::infinity();
  int iterations = 0;
  bool converged = false;
};

// Minimizes f over the box [lower, upper]. `f(x, &grad)` returns the value
// and writes the gradient; it may return +inf for points it cannot
// evaluate, which the line search treats as a failed step.
template <typename Scalar, typename Fn>
LbfgsResult<Scalar> MinimizeLbfgs(Fn &&f, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x,
                                  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &lower,
                                  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &upper,
                                  const LbfgsOptions<Scalar> &options = {}) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  x = x.cwiseMax(lower).cwiseMin(upper);
  Vector grad(x.size());
  Scalar value = f(x, &grad);
  LbfgsResult<Scalar> result;
  if (!std::isfinite(value)) {
    result.x = x;
    return result;
  }
  std::deque<Vector> s_hist, y_hist;
  std::deque<Scalar> rho_hist;
  for (int it = 0; it < options.max_iterations; ++it) {
    result.iterations = it + 1;
    if (grad.cwiseAbs().maxCoeff() < options.gradient_tolerance) {
      result.converged = true;
      break;
    }
    // Two-loop recursion.
    Vector q = grad;
    std::vector<Scalar> a(s_hist.size());
    for (int k = static_cast<int>(s_hist.size()) - 1; k >= 0; --k) {
      a[k] = rho_hist[k] * s_hist[k].dot(q);
      q -= a[k] * y_hist[k];
    }
    if (!s_hist.empty()) {
      q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    }
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const Scalar b = rho_hist[k] * y_hist[k].dot(q);
      q += (a[k] - b) * s_hist[k];
    }
    Vector direction = -q;
    if (direction.dot(grad) >= 0) {
      direction = -grad;
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }
    Scalar step = s_hist.empty() ? Scalar(1) / std::max(Scalar(1), grad.norm()) : Scalar(1);
    Vector next_x, next_grad(x.size());
    Scalar next_value = std::numeric_limits<Scalar>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < options.max_line_search_steps; ++ls) {
      next_x = (x + step * direction).cwiseMax(lower).cwiseMin(upper);
      next_value = f(next_x, &next_grad);
      const Scalar decrease = grad.dot(next_x - x);
      if (std::isfinite(next_value) && next_value <= value + Scalar(1e-4) * decrease) {
        accepted = true;
        break;
      }
      step *= Scalar(0.5);
    }
    if (!accepted) break;
    const Vector s = next_x - x;
    const Vector yv = next_grad - grad;
    const Scalar sy = s.dot(yv);
    const Scalar previous = value;
    x = next_x;
    grad = next_grad;
    value = next_value;
    if (sy > Scalar(1e-12) * s.norm() * yv.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(yv);
      rho_hist.push_back(Scalar(1) / sy);
      if (static_cast<int>(s_hist.size()) > options.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    if (std::abs(previous - value) <=
        options.function_tolerance * std::max(Scalar(1), std::abs(value))) {
      result.converged = true;
      break;
    }
  }
  result.x = x;
  result.value = value;
  return result;
}

}  // namespace cascade

#endif  // CASCADE_LBFGS_H_
