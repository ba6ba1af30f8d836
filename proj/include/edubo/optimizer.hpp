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

#ifndef EDUBO_OPTIMIZER_HPP
#define EDUBO_OPTIMIZER_HPP

#include "edubo/box_ascent.hpp"
#include "edubo/core.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <vector>

namespace edubo {

/// Latin hypercube design: each coordinate's n values fall in distinct strata [i/n, (i+1)/n),
/// in random order and uniformly jittered within the stratum.
inline std::vector<Vector> lhs(std::size_t n, std::size_t d, Rng& rng) {
  if (n == 0) throw InputError("lhs needs n >= 1");
  std::vector<Vector> pts(n, Vector(static_cast<Eigen::Index>(d)));
  std::vector<std::size_t> perm(n);
  for (std::size_t k = 0; k < d; ++k) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) {
      const auto j = std::min(i, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i + 1)));
      std::swap(perm[i], perm[j]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double u = uniform01(rng);
      pts[i][static_cast<Eigen::Index>(k)] = (static_cast<double>(perm[i]) + u) / static_cast<double>(n);
    }
  }
  return pts;
}

struct OptimizerConfig {
  /// 0 selects round(4.5 d), d being the problem (not batch) dimension.
  int n_restarts = 0;
  int max_iters = 200;
  double grad_tol = 1e-6;
  /// Size of the screened LHS pool per restart; the best-valued pool points seed the ascents. 1 disables screening.
  int candidates_per_restart = 32;

  [[nodiscard]] int restarts_for(std::size_t d) const {
    if (n_restarts > 0) return n_restarts;
    return std::max(1, static_cast<int>(std::lround(4.5 * static_cast<double>(d))));
  }
};

struct OptResult {
  Vector argmax;
  double value = 0.0;
  std::vector<double> restart_values;  // NaN for discarded restarts
  std::vector<double> start_values;
  int best_restart = -1;
};

namespace detail {

inline OptResult multistart(const ValueGradFn& acq, std::size_t dim, int restarts, const OptimizerConfig& cfg, Rng& rng) {
  if (dim == 0) throw InputError("optimization dimension must be positive");
  if (cfg.candidates_per_restart < 1) throw ConfigError("candidates_per_restart must be >= 1");
  auto pool = lhs(static_cast<std::size_t>(restarts) * static_cast<std::size_t>(cfg.candidates_per_restart), dim, rng);
  std::vector<Vector> starts;
  if (cfg.candidates_per_restart == 1) {
    starts = std::move(pool);
  } else {
    std::vector<double> score(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const double v = acq(pool[i], nullptr);
      score[i] = std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    }
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    for (int r = 0; r < restarts; ++r) starts.push_back(pool[order[static_cast<std::size_t>(r)]]);
  }
  const Vector lo = Vector::Zero(static_cast<Eigen::Index>(dim));
  const Vector hi = Vector::Ones(static_cast<Eigen::Index>(dim));
  AscentOptions opts;
  opts.max_iters = cfg.max_iters;
  opts.grad_tol = cfg.grad_tol;

  OptResult out;
  out.value = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    const auto res = projected_ascent(acq, starts[static_cast<std::size_t>(r)], lo, hi, opts);
    out.start_values.push_back(res.start_value);
    if (!res.finite_start || !std::isfinite(res.value)) {
      std::cerr << "edubo: discarding restart " << r << " (non-finite acquisition value)\n";
      out.restart_values.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    out.restart_values.push_back(res.value);
    if (res.value > out.value) {
      out.value = res.value;
      out.argmax = clamp_unit(res.x);
      out.best_restart = r;
    }
  }
  if (out.best_restart < 0) throw OptimizationError("all acquisition restarts produced non-finite values");
  return out;
}

}  // namespace detail

/// Multi-start projected quasi-Newton maximization over [0,1]^dim. Starts are the best-scoring
/// points of a Latin hypercube pool of restarts * candidates_per_restart points.
/// Ties between restarts go to the lowest restart index.
inline OptResult maximize(const ValueGradFn& acq, std::size_t dim, const OptimizerConfig& cfg, Rng& rng) {
  return detail::multistart(acq, dim, cfg.restarts_for(dim), cfg, rng);
}

/// Joint maximization over q points in [0,1]^d, stacked as one q*d vector.
inline OptResult maximize_batch(const ValueGradFn& acq_q, std::size_t q, std::size_t d, const OptimizerConfig& cfg,
                                Rng& rng) {
  if (q == 0) throw InputError("batch size must be positive");
  return detail::multistart(acq_q, q * d, cfg.restarts_for(d), cfg, rng);
}

}  // namespace edubo

#endif  // EDUBO_OPTIMIZER_HPP
