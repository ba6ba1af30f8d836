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

#ifndef EDUBO_METRICS_HPP
#define EDUBO_METRICS_HPP

#include "edubo/benchmarks.hpp"
#include "edubo/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace edubo {

struct GroundTruth {
  std::vector<Vector> minimizers;  // unit-cube coordinates
  double f_star = 0.0;
  double epsilon = 0.0;

  [[nodiscard]] double threshold() const { return f_star + epsilon; }

  static GroundTruth from(const Benchmark& b) {
    if (!b.f_star || b.minimizers.empty()) throw ConfigError(b.name + " has no ground-truth minimizers");
    if (!(b.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    return {b.minimizers, *b.f_star, b.epsilon};
  }
};

/// Maps tolerable points to the index of the minimizer whose subregion contains them.
/// For d <= 2 subregions are connected components of {f <= f_star + eps} on a grid of `resolution`
/// cells per axis; above that each tolerable point goes to its nearest minimizer.
class SubregionOracle {
 public:
  static constexpr int kDefaultResolution = 512;

  SubregionOracle(GroundTruth gt, std::function<double(const Vector&)> f, int resolution = kDefaultResolution)
      : gt_(std::move(gt)), f_(std::move(f)), res_(resolution) {
    if (gt_.minimizers.empty()) throw ConfigError("ground truth needs at least one minimizer");
    dim_ = static_cast<std::size_t>(gt_.minimizers.front().size());
    if (dim_ <= 2) build_grid();
  }

  [[nodiscard]] std::size_t count() const { return gt_.minimizers.size(); }
  [[nodiscard]] const GroundTruth& truth() const { return gt_; }

  [[nodiscard]] std::optional<std::size_t> subregion_of(const Vector& x) const { return subregion_of(x, f_(x)); }

  /// As above with f(x) already known.
  [[nodiscard]] std::optional<std::size_t> subregion_of(const Vector& x, double fx) const {
    if (!(fx <= gt_.threshold())) return std::nullopt;
    if (dim_ > 2) return nearest(x);
    const auto c = cell_of(x);
    int label = labels_[c];
    if (label < 0) {
      // x is tolerable but its cell centre is not: borrow a tolerable neighbour's label.
      for (const auto n : neighbours(c, true)) {
        if (labels_[n] >= 0) {
          label = labels_[n];
          break;
        }
      }
    }
    if (label < 0) return nearest(x);
    const int k = component_owner_[static_cast<std::size_t>(label)];
    if (k < 0) return std::nullopt;
    return static_cast<std::size_t>(k);
  }

 private:
  [[nodiscard]] std::size_t n_cells() const { return dim_ == 1 ? static_cast<std::size_t>(res_) : static_cast<std::size_t>(res_) * res_; }

  [[nodiscard]] std::size_t cell_of(const Vector& x) const {
    const auto idx = [&](double v) { return std::clamp(static_cast<int>(std::floor(v * res_)), 0, res_ - 1); };
    if (dim_ == 1) return static_cast<std::size_t>(idx(x[0]));
    return static_cast<std::size_t>(idx(x[0])) * static_cast<std::size_t>(res_) + static_cast<std::size_t>(idx(x[1]));
  }

  [[nodiscard]] Vector centre(std::size_t c) const {
    Vector x(static_cast<Eigen::Index>(dim_));
    if (dim_ == 1) {
      x[0] = (static_cast<double>(c) + 0.5) / res_;
    } else {
      x[0] = (static_cast<double>(c / static_cast<std::size_t>(res_)) + 0.5) / res_;
      x[1] = (static_cast<double>(c % static_cast<std::size_t>(res_)) + 0.5) / res_;
    }
    return x;
  }

  [[nodiscard]] std::vector<std::size_t> neighbours(std::size_t c, bool diagonal) const {
    std::vector<std::size_t> out;
    if (dim_ == 1) {
      if (c > 0) out.push_back(c - 1);
      if (c + 1 < static_cast<std::size_t>(res_)) out.push_back(c + 1);
      return out;
    }
    const int i = static_cast<int>(c / static_cast<std::size_t>(res_));
    const int j = static_cast<int>(c % static_cast<std::size_t>(res_));
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        if ((di == 0 && dj == 0) || (!diagonal && di != 0 && dj != 0)) continue;
        const int a = i + di;
        const int b = j + dj;
        if (a < 0 || b < 0 || a >= res_ || b >= res_) continue;
        out.push_back(static_cast<std::size_t>(a) * static_cast<std::size_t>(res_) + static_cast<std::size_t>(b));
      }
    }
    return out;
  }

  void build_grid() {
    const auto n = n_cells();
    std::vector<char> ok(n);
    for (std::size_t c = 0; c < n; ++c) ok[c] = f_(centre(c)) <= gt_.threshold();
    labels_.assign(n, -1);
    int next = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n; ++s) {
      if (!ok[s] || labels_[s] >= 0) continue;
      labels_[s] = next;
      stack.push_back(s);
      while (!stack.empty()) {
        const auto c = stack.back();
        stack.pop_back();
        for (const auto m : neighbours(c, false)) {
          if (ok[m] && labels_[m] < 0) {
            labels_[m] = next;
            stack.push_back(m);
          }
        }
      }
      ++next;
    }
    component_owner_.assign(static_cast<std::size_t>(next), -1);
    for (std::size_t k = 0; k < gt_.minimizers.size(); ++k) {
      const int label = labels_[cell_of(gt_.minimizers[k])];
      if (label < 0) throw NumericalError("a registry minimizer lies outside the tolerable grid region");
      if (component_owner_[static_cast<std::size_t>(label)] >= 0)
        throw NumericalError("two registry minimizers share one tolerable subregion");
      component_owner_[static_cast<std::size_t>(label)] = static_cast<int>(k);
    }
  }

  [[nodiscard]] std::size_t nearest(const Vector& x) const {
    std::size_t best = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < gt_.minimizers.size(); ++k) {
      const double d = (gt_.minimizers[k] - x).squaredNorm();
      if (d < dist) {
        dist = d;
        best = k;
      }
    }
    return best;
  }

  GroundTruth gt_;
  std::function<double(const Vector&)> f_;
  int res_;
  std::size_t dim_ = 0;
  std::vector<int> labels_;
  std::vector<int> component_owner_;
};

/// Fraction of the K subregions that contain at least one of the points.
inline double coverage_rate(const std::vector<Vector>& points, const std::vector<double>& values, const SubregionOracle& oracle) {
  if (points.size() != values.size()) throw InputError("points and values differ in length");
  std::vector<char> found(oracle.count(), 0);
  for (std::size_t i = 0; i < points.size(); ++i)
    if (const auto k = oracle.subregion_of(points[i], values[i])) found[*k] = 1;
  return static_cast<double>(std::count(found.begin(), found.end(), 1)) / static_cast<double>(oracle.count());
}

/// Running coverage after each evaluation.
inline std::vector<double> coverage_trajectory(const std::vector<Vector>& points, const std::vector<double>& values,
                                               const SubregionOracle& oracle) {
  if (points.size() != values.size()) throw InputError("points and values differ in length");
  std::vector<char> found(oracle.count(), 0);
  std::size_t n_found = 0;
  std::vector<double> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (const auto k = oracle.subregion_of(points[i], values[i]); k && !found[*k]) {
      found[*k] = 1;
      ++n_found;
    }
    out.push_back(static_cast<double>(n_found) / static_cast<double>(oracle.count()));
  }
  return out;
}

/// Running f_min - f_star after each evaluation.
inline std::vector<double> optimization_gap(const std::vector<double>& values, double f_star) {
  std::vector<double> out;
  double f_min = std::numeric_limits<double>::infinity();
  for (double v : values) {
    f_min = std::min(f_min, v);
    out.push_back(f_min - f_star);
  }
  return out;
}

// --- Space-filling metrics -------------------------------------------------

/// Halton sequence points 0 .. n-1 in [0,1]^d (radical inverses in the first d primes).
inline std::vector<Vector> halton(std::size_t n, std::size_t d) {
  static constexpr std::array<unsigned, 32> primes{2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31,  37,  41,  43,  47,  53,
                                                   59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};
  if (d == 0 || d > primes.size()) throw InputError("halton supports 1 to 32 dimensions");
  std::vector<Vector> out(n, Vector(static_cast<Eigen::Index>(d)));
  for (std::size_t k = 0; k < d; ++k) {
    const unsigned b = primes[k];
    for (std::size_t i = 0; i < n; ++i) {
      double f = 1.0;
      double r = 0.0;
      for (std::size_t m = i; m > 0; m /= b) {
        f /= b;
        r += f * static_cast<double>(m % b);
      }
      out[i][static_cast<Eigen::Index>(k)] = r;
    }
  }
  return out;
}

struct SpaceFilling {
  double sf1 = 0.0;  // max distance from the cube to the basket
  double sf2 = 0.0;  // mean distance from the cube to the basket
};

inline constexpr std::size_t kDefaultSfCandidates = std::size_t{1} << 14;

/// SF1 and SF2 of a basket, estimated on a Halton candidate set. `projection` selects coordinates.
inline SpaceFilling sf_metrics(const std::vector<Vector>& basket, std::size_t d, const std::vector<std::size_t>& projection = {},
                               std::size_t n_candidates = kDefaultSfCandidates) {
  if (basket.empty()) throw InputError("space-filling metrics need a nonempty basket");
  if (n_candidates == 0) throw InputError("need at least one candidate");
  std::vector<std::size_t> coords = projection;
  if (coords.empty())
    for (std::size_t k = 0; k < d; ++k) coords.push_back(k);
  for (auto c : coords)
    if (c >= d) throw InputError("projection coordinate out of range");
  const auto pd = static_cast<Eigen::Index>(coords.size());
  Matrix T(static_cast<Eigen::Index>(basket.size()), pd);
  for (std::size_t i = 0; i < basket.size(); ++i) {
    if (static_cast<std::size_t>(basket[i].size()) != d) throw InputError("basket point has the wrong dimension");
    for (Eigen::Index k = 0; k < pd; ++k) T(static_cast<Eigen::Index>(i), k) = basket[i][static_cast<Eigen::Index>(coords[static_cast<std::size_t>(k)])];
  }
  SpaceFilling out;
  double sum = 0.0;
  for (const auto& c : halton(n_candidates, coords.size())) {
    const double q = std::sqrt((T.rowwise() - c.transpose()).rowwise().squaredNorm().minCoeff());
    out.sf1 = std::max(out.sf1, q);
    sum += q;
  }
  out.sf2 = sum / static_cast<double>(n_candidates);
  return out;
}

}  // namespace edubo

#endif  // EDUBO_METRICS_HPP
