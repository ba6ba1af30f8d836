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

#ifndef EDUBO_BENCHMARKS_HPP
#define EDUBO_BENCHMARKS_HPP

#include "edubo/core.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace edubo {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// A test problem posed on [0,1]^d; `native` works in the problem's own coordinates.
struct Benchmark {
  std::string name;
  std::size_t dim = 0;
  std::function<double(const Vector&)> native;
  std::vector<Interval> bounds;
  std::vector<Vector> minimizers;  // unit-cube coordinates
  std::optional<double> f_star;
  std::optional<double> f_lower;  // provable lower bound when f_star is unknown
  double epsilon = 0.0;

  [[nodiscard]] Vector to_native(const Vector& u) const {
    Vector x(u.size());
    for (Eigen::Index k = 0; k < u.size(); ++k) {
      const auto& b = bounds[static_cast<std::size_t>(k)];
      x[k] = b.lo + u[k] * (b.hi - b.lo);
    }
    return x;
  }

  [[nodiscard]] Vector to_unit(const Vector& x) const {
    Vector u(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      const auto& b = bounds[static_cast<std::size_t>(k)];
      u[k] = (x[k] - b.lo) / (b.hi - b.lo);
    }
    return u;
  }

  [[nodiscard]] double eval(const Vector& u) const {
    if (static_cast<std::size_t>(u.size()) != dim) throw InputError(name + ": wrong input dimension");
    return native(to_native(u));
  }
};

// --- 2^d bowls ------------------------------------------------------------

inline constexpr double kBowlWidth = 0.15;

/// -sum_l phi_d((x - mu_l) / xi) over the 2^d centres mu_l in {1/4, 3/4}^d.
/// The density is not divided by xi^d.
inline double bowls_eval(const Vector& x, Vector* grad = nullptr, Matrix* hess = nullptr) {
  const auto d = x.size();
  if (d < 1 || d > 30) throw InputError("bowls dimension out of range");
  const double norm = std::pow(2.0 * M_PI, -0.5 * static_cast<double>(d));
  if (grad) grad->setZero(d);
  if (hess) hess->setZero(d, d);
  double f = 0.0;
  Vector z(d);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
    for (Eigen::Index k = 0; k < d; ++k) z[k] = (x[k] - ((mask >> k) & 1U ? 0.75 : 0.25)) / kBowlWidth;
    const double phi = norm * std::exp(-0.5 * z.squaredNorm());
    f -= phi;
    if (grad) *grad += phi * z / kBowlWidth;
    if (hess) *hess += phi * (Matrix::Identity(d, d) - z * z.transpose()) / (kBowlWidth * kBowlWidth);
  }
  return f;
}

inline Vector bowls_refine(Vector x) {
  for (int it = 0; it < 50; ++it) {
    Vector g;
    Matrix H;
    bowls_eval(x, &g, &H);
    const Vector step = H.ldlt().solve(g);
    x -= step;
    if (step.lpNorm<Eigen::Infinity>() < 1e-14) break;
  }
  return x;
}

inline Benchmark bowls_registry(std::size_t d) {
  if (d < 1 || d > 12) throw ConfigError("bowls registry supports 1 <= d <= 12");
  Benchmark b;
  b.name = "bowls" + std::to_string(d);
  b.dim = d;
  b.native = [](const Vector& x) { return bowls_eval(x); };
  b.bounds.assign(d, Interval{0.0, 1.0});
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
    Vector mu(static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) mu[static_cast<Eigen::Index>(k)] = (mask >> k) & 1U ? 0.75 : 0.25;
    const Vector m = bowls_refine(mu);
    best = std::min(best, bowls_eval(m));
    b.minimizers.push_back(m);
  }
  b.f_star = best;
  b.epsilon = std::abs(best) / 10.0;
  return b;
}

// --- Six-hump camel sum ----------------------------------------------------

inline double camel2(double t, double e) {
  const double t2 = t * t;
  const double e2 = e * e;
  return (4.0 - 2.1 * t2 + t2 * t2 / 3.0) * t2 + t * e + (-4.0 + 4.0 * e2) * e2;
}

inline Eigen::Vector2d camel2_grad(double t, double e) {
  const double t2 = t * t;
  return {8.0 * t - 8.4 * t2 * t + 2.0 * t2 * t2 * t + e, t - 8.0 * e + 16.0 * e * e * e};
}

inline Eigen::Matrix2d camel2_hess(double t, double e) {
  Eigen::Matrix2d H;
  H << 8.0 - 25.2 * t * t + 10.0 * t * t * t * t, 1.0, 1.0, -8.0 + 48.0 * e * e;
  return H;
}

/// 2 + sum over the four (tau, eta) pairs of the six-hump camel.
inline double camel8_eval(const Vector& x) {
  if (x.size() != 8) throw InputError("camel8 takes 8 inputs");
  double f = 2.0;
  for (int l = 0; l < 4; ++l) f += camel2(x[2 * l], x[2 * l + 1]);
  return f;
}

/// Stationary points of the 2-d camel reached by Newton from a start grid, kept when the Hessian is
/// positive definite. Sorted by value.
inline std::vector<Eigen::Vector2d> camel2_local_minima() {
  std::vector<Eigen::Vector2d> found;
  for (int i = 0; i <= 24; ++i) {
    for (int j = 0; j <= 16; ++j) {
      Eigen::Vector2d p(-3.0 + 0.25 * i, -2.0 + 0.25 * j);
      bool ok = false;
      for (int it = 0; it < 100; ++it) {
        const Eigen::Vector2d step = camel2_hess(p[0], p[1]).fullPivLu().solve(camel2_grad(p[0], p[1]));
        if (!step.allFinite()) break;
        p -= step;
        if (step.lpNorm<Eigen::Infinity>() < 1e-15) {
          ok = true;
          break;
        }
      }
      if (!ok || std::abs(p[0]) > 3.0 || std::abs(p[1]) > 2.0) continue;
      if (camel2_hess(p[0], p[1]).llt().info() != Eigen::Success) continue;
      bool dup = false;
      for (const auto& q : found) dup = dup || (q - p).norm() < 1e-8;
      if (!dup) found.push_back(p);
    }
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return camel2(a[0], a[1]) < camel2(b[0], b[1]); });
  return found;
}

inline Benchmark camel8_registry() {
  Benchmark b;
  b.name = "camel8";
  b.dim = 8;
  b.native = camel8_eval;
  for (int l = 0; l < 4; ++l) {
    b.bounds.push_back({-3.0, 3.0});
    b.bounds.push_back({-2.0, 2.0});
  }
  const auto minima = camel2_local_minima();
  if (minima.size() < 2) throw NumericalError("camel minimum catalog is incomplete");
  const double g_star = camel2(minima[0][0], minima[0][1]);
  std::vector<Eigen::Vector2d> global;
  for (const auto& m : minima)
    if (camel2(m[0], m[1]) - g_star < 1e-12) global.push_back(m);
  if (global.size() != 2) throw NumericalError("expected two global camel minimizers");
  b.f_star = 2.0 + 4.0 * g_star;
  b.epsilon = std::abs(*b.f_star) / 10.0;
  for (const auto& m : minima) {
    const double excess = camel2(m[0], m[1]) - g_star;
    if (excess >= 1e-12 && excess <= b.epsilon)
      throw NumericalError("a non-global camel minimum falls inside the tolerance band");
  }
  for (int mask = 0; mask < 16; ++mask) {
    Vector x(8);
    for (int l = 0; l < 4; ++l) x.segment<2>(2 * l) = global[static_cast<std::size_t>((mask >> l) & 1)];
    b.minimizers.push_back(b.to_unit(x));
  }
  return b;
}

// --- Rover trajectory ------------------------------------------------------

struct Rect {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  [[nodiscard]] bool contains(const Eigen::Vector2d& p) const {
    return p[0] >= xmin && p[0] <= xmax && p[1] >= ymin && p[1] <= ymax;
  }
};

struct RoverEnv {
  std::vector<Rect> obstacles;
  Eigen::Vector2d start{0.05, 0.05};
  Eigen::Vector2d target{0.75, 0.75};
  int M = 1000;
  double penalty_rate = 30.0;
  double base_rate = 0.05;
  double offset = 5.0;
  double scale = 100.0;

  static constexpr int kTurns = 6;
  static constexpr double kStepLo = -1.0 / 15.0;
  static constexpr double kStepHi = 1.0 / 3.0;

  void validate() const {
    if (M < 2) throw ConfigError("rover M must be at least 2");
    for (const auto& r : obstacles) {
      if (!(r.xmin < r.xmax && r.ymin < r.ymax)) throw ConfigError("rover obstacle is not a valid rectangle");
      if (r.contains(start) || r.contains(target)) throw ConfigError("rover obstacle covers the start or target");
    }
  }

  [[nodiscard]] bool on_obstacle(const Eigen::Vector2d& p) const {
    for (const auto& r : obstacles)
      if (r.contains(p)) return true;
    return false;
  }
};

/// M points spaced uniformly in arc length along the polyline start, start + d_1, ..., start + d_1 + ... + d_6.
inline std::vector<Eigen::Vector2d> path_from_params(const Vector& p, const RoverEnv& env) {
  if (p.size() != 2 * RoverEnv::kTurns) throw InputError("rover parameters must have 12 entries");
  std::vector<Eigen::Vector2d> w{env.start};
  for (int k = 0; k < RoverEnv::kTurns; ++k) w.push_back(w.back() + Eigen::Vector2d(p[2 * k], p[2 * k + 1]));
  std::vector<double> cum{0.0};
  for (std::size_t k = 1; k < w.size(); ++k) cum.push_back(cum.back() + (w[k] - w[k - 1]).norm());
  const double total = cum.back();
  std::vector<Eigen::Vector2d> out;
  out.reserve(static_cast<std::size_t>(env.M));
  std::size_t seg = 1;
  for (int m = 0; m < env.M; ++m) {
    if (total <= 0.0) {
      out.push_back(env.start);
      continue;
    }
    const double s = total * static_cast<double>(m) / static_cast<double>(env.M - 1);
    while (seg + 1 < w.size() && cum[seg] < s) ++seg;
    const double len = cum[seg] - cum[seg - 1];
    const double t = len > 0.0 ? std::clamp((s - cum[seg - 1]) / len, 0.0, 1.0) : 0.0;
    out.push_back(w[seg - 1] + t * (w[seg] - w[seg - 1]));
  }
  out.back() = w.back();
  return out;
}

inline double rover_eval(const Vector& p, const RoverEnv& env) {
  const auto P = path_from_params(p, env);
  const auto cost = [&](const Eigen::Vector2d& q) { return (env.on_obstacle(q) ? env.penalty_rate : 0.0) + env.base_rate; };
  double f = env.scale * (P.back() - env.target).norm() - env.offset;
  double prev = cost(P[0]);
  for (std::size_t m = 0; m + 1 < P.size(); ++m) {
    const double next = cost(P[m + 1]);
    f += 0.5 * (prev + next) * (P[m] - P[m + 1]).norm();
    prev = next;
  }
  return f;
}

struct ObstacleGenerator {
  int count = 0;
  double min_size = 0.05;
  double max_size = 0.2;
  std::uint64_t seed = 0;
  int max_retries = 1000;
};

/// Draws `count` rectangles inside [0,1]^2, redrawing any that covers the start or target.
inline std::vector<Rect> generate_obstacles(const ObstacleGenerator& g, const RoverEnv& env) {
  if (g.count < 0 || !(g.min_size > 0.0) || !(g.max_size >= g.min_size) || g.max_size >= 1.0)
    throw ConfigError("invalid obstacle generator settings");
  Rng rng(mix_seed(g.seed));
  std::vector<Rect> out;
  for (int i = 0; i < g.count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < g.max_retries && !placed; ++attempt) {
      const double w = g.min_size + uniform01(rng) * (g.max_size - g.min_size);
      const double h = g.min_size + uniform01(rng) * (g.max_size - g.min_size);
      const double x0 = uniform01(rng) * (1.0 - w);
      const double y0 = uniform01(rng) * (1.0 - h);
      const Rect r{x0, y0, x0 + w, y0 + h};
      if (r.contains(env.start) || r.contains(env.target)) continue;
      out.push_back(r);
      placed = true;
    }
    if (!placed) throw ConfigError("could not place obstacle " + std::to_string(i) + " within the retry budget");
  }
  return out;
}

/// Builds an environment from {"M", "obstacles": [[xmin, ymin, xmax, ymax], ...], "generate": {...}}.
/// Explicit and generated obstacles are combined.
inline RoverEnv rover_env_from_json(const nlohmann::json& j) {
  RoverEnv env;
  try {
    env.M = j.value("M", 1000);
    for (const auto& r : j.value("obstacles", nlohmann::json::array())) {
      if (!r.is_array() || r.size() != 4) throw ConfigError("rover obstacle must be [xmin, ymin, xmax, ymax]");
      env.obstacles.push_back({r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>()});
    }
    if (j.contains("generate")) {
      const auto& g = j.at("generate");
      ObstacleGenerator gen;
      gen.count = g.value("count", 0);
      gen.min_size = g.value("min_size", gen.min_size);
      gen.max_size = g.value("max_size", gen.max_size);
      gen.seed = g.value("seed", std::uint64_t{0});
      gen.max_retries = g.value("max_retries", gen.max_retries);
      const auto extra = generate_obstacles(gen, env);
      env.obstacles.insert(env.obstacles.end(), extra.begin(), extra.end());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("rover environment: ") + e.what());
  }
  env.validate();
  return env;
}

inline RoverEnv rover_env_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open rover environment file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("rover environment " + path + ": " + e.what());
  }
  return rover_env_from_json(j);
}

inline Benchmark rover_registry(const RoverEnv& env) {
  env.validate();
  Benchmark b;
  b.name = "rover";
  b.dim = 2 * RoverEnv::kTurns;
  b.native = [env](const Vector& x) { return rover_eval(x, env); };
  b.bounds.assign(b.dim, Interval{RoverEnv::kStepLo, RoverEnv::kStepHi});
  // 100 a + 0.05 b >= 0.05 (a + b) >= 0.05 |target - start| by the triangle inequality.
  b.f_lower = env.base_rate * (env.target - env.start).norm() - env.offset;
  b.epsilon = 17.0;
  return b;
}

/// Registry lookup by name: "bowls<d>", "camel8" or "rover" (with an environment).
inline Benchmark benchmark_by_name(const std::string& name, const std::optional<RoverEnv>& env = std::nullopt) {
  if (name == "camel8") return camel8_registry();
  if (name == "rover") return rover_registry(env.value_or(RoverEnv{}));
  if (name.rfind("bowls", 0) == 0) {
    try {
      std::size_t used = 0;
      const int d = std::stoi(name.substr(5), &used);
      if (used == name.size() - 5 && d >= 1) return bowls_registry(static_cast<std::size_t>(d));
    } catch (const std::logic_error&) {
    }
  }
  throw ConfigError("unknown benchmark '" + name + "'");
}

}  // namespace edubo

#endif  // EDUBO_BENCHMARKS_HPP
