// Copyright 2026 The edubo Authors
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

#ifndef EDUBO_BOX_ASCENT_HPP
#define EDUBO_BOX_ASCENT_HPP

#include "edubo/core.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>

namespace edubo {

/// Objective returning its value and, when `grad` is non-null, the gradient.
/// Infeasible points may return -inf or NaN; the line search backs off from them.
using ValueGradFn = std::function<double(const Vector& x, Vector* grad)>;

struct AscentOptions {
  int max_iters = 200;
  double grad_tol = 1e-6;
  int memory = 8;
  /// Length of the first trial step, as a fraction of the narrowest box side.
  double initial_step = 0.1;
};

struct AscentResult {
  Vector x;
  double value = -std::numeric_limits<double>::infinity();
  double start_value = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  bool finite_start = true;
};

namespace detail {

inline Vector project(const Vector& x, const Vector& lo, const Vector& hi) { return x.cwiseMax(lo).cwiseMin(hi); }

inline Vector projected_gradient(const Vector& x, const Vector& g, const Vector& lo, const Vector& hi) {
  return project(x + g, lo, hi) - x;
}

}  // namespace detail

/// Projected limited-memory quasi-Newton ascent on a box.
///
/// Variables sitting on a bound whose gradient points outward are frozen for the
/// step; the search direction comes from the L-BFGS two-loop recursion on the
/// remaining ones and falls back to the projected gradient when it is not an
/// ascent direction. Steps are accepted only on a sufficient value increase, so
/// the returned value is never below the start value.
inline AscentResult projected_ascent(const ValueGradFn& f, const Vector& x0, const Vector& lo, const Vector& hi,
                                     const AscentOptions& opts = {}) {
  const Eigen::Index n = x0.size();
  AscentResult res;
  res.x = detail::project(x0, lo, hi);
  Vector g(n);
  res.value = f(res.x, &g);
  res.start_value = res.value;
  if (!std::isfinite(res.value) || !g.allFinite()) {
    res.finite_start = false;
    return res;
  }

  const double min_width = (hi - lo).minCoeff();
  std::deque<Vector> s_hist;
  std::deque<Vector> y_hist;
  int stalls = 0;

  for (int it = 0; it < opts.max_iters; ++it) {
    res.iterations = it + 1;
    const Vector pg = detail::projected_gradient(res.x, g, lo, hi);
    if (pg.lpNorm<Eigen::Infinity>() < opts.grad_tol) {
      res.converged = true;
      break;
    }

    Vector mask = Vector::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if ((res.x[i] <= lo[i] && g[i] < 0.0) || (res.x[i] >= hi[i] && g[i] > 0.0)) mask[i] = 0.0;
    }
    const Vector gf = g.cwiseProduct(mask);

    // Two-loop recursion for the inverse Hessian of -f applied to the ascent direction.
    Vector d = gf;
    std::vector<double> alpha(s_hist.size());
    for (int k = static_cast<int>(s_hist.size()) - 1; k >= 0; --k) {
      const double rho = 1.0 / y_hist[k].dot(s_hist[k]);
      alpha[k] = rho * s_hist[k].dot(d);
      d -= alpha[k] * y_hist[k];
    }
    double t = 1.0;
    if (!s_hist.empty()) {
      d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      for (std::size_t k = 0; k < s_hist.size(); ++k) {
        const double rho = 1.0 / y_hist[k].dot(s_hist[k]);
        const double beta = rho * y_hist[k].dot(d);
        d += (alpha[k] - beta) * s_hist[k];
      }
    }
    d = d.cwiseProduct(mask);
    if (s_hist.empty() || !(d.dot(gf) > 0.0)) {
      s_hist.clear();
      y_hist.clear();
      d = gf;
      const double dn = d.lpNorm<Eigen::Infinity>();
      if (dn > 0.0) t = std::min(1.0, opts.initial_step * min_width / dn);
    }

    bool accepted = false;
    Vector xn;
    Vector gn(n);
    double vn = 0.0;
    for (int ls = 0; ls < 40; ++ls) {
      xn = detail::project(res.x + t * d, lo, hi);
      if ((xn - res.x).lpNorm<Eigen::Infinity>() == 0.0) break;
      vn = f(xn, &gn);
      const double predicted = std::max(0.0, g.dot(xn - res.x));
      if (std::isfinite(vn) && gn.allFinite() && vn > res.value && vn >= res.value + 1e-4 * predicted) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;

    const Vector s = xn - res.x;
    const Vector y = g - gn;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      if (static_cast<int>(s_hist.size()) > opts.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
      }
    }
    const double gain = vn - res.value;
    res.x = xn;
    res.value = vn;
    g = gn;
    stalls = gain <= 1e-15 * std::max(1.0, std::abs(vn)) ? stalls + 1 : 0;
    if (stalls >= 3) break;
  }
  return res;
}

}  // namespace edubo

#endif  // EDUBO_BOX_ASCENT_HPP
