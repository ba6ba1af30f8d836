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

#include <gtest/gtest.h>

#include <edubo/benchmarks.hpp>

#include "oracles.hpp"

#include <cmath>

namespace edubo {
namespace {

double bowls_direct(double x, double y) {
  double f = 0.0;
  for (double a : {0.25, 0.75})
    for (double b : {0.25, 0.75}) {
      const double zx = (x - a) / 0.15;
      const double zy = (y - b) / 0.15;
      f -= std::exp(-0.5 * (zx * zx + zy * zy)) / (2.0 * M_PI);
    }
  return f;
}

TEST(Bowls, FourTermSum) {
  EXPECT_NEAR(bowls_eval(Vector{{0.25, 0.25}}), bowls_direct(0.25, 0.25), 1e-15);
  EXPECT_NEAR(bowls_eval(Vector{{0.25, 0.25}}), -0.160387882315988950, 1e-15);
  EXPECT_NEAR(bowls_eval(Vector{{0.1, 0.9}}), bowls_direct(0.1, 0.9), 1e-15);
}

TEST(Bowls, CentreBySymmetry) {
  const double z = 0.25 / 0.15;
  EXPECT_NEAR(bowls_eval(Vector{{0.5, 0.5}}), -4.0 * std::exp(-z * z) / (2.0 * M_PI), 1e-15);
  EXPECT_NEAR(bowls_eval(Vector{{0.5, 0.5}}), -0.039582804569567139, 1e-15);
}

TEST(Bowls, NegativeEverywhere) {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) EXPECT_LT(bowls_eval(uniform_point(3, rng)), 0.0);
}

TEST(Bowls, TwoDimRegistry) {
  const auto b = bowls_registry(2);
  ASSERT_EQ(b.minimizers.size(), 4u);
  ASSERT_TRUE(b.f_star);
  EXPECT_NEAR(b.epsilon, std::abs(*b.f_star) / 10.0, 1e-15);
  for (const auto& m : b.minimizers) {
    double best = 1.0;
    for (double a : {0.25, 0.75})
      for (double c : {0.25, 0.75}) best = std::min(best, (m - Vector{{a, c}}).lpNorm<Eigen::Infinity>());
    EXPECT_LT(best, 5e-3);
    EXPECT_LE(b.eval(m), *b.f_star + 1e-9);
    const Vector g = oracle::fd_gradient([&](const Vector& x) { return bowls_direct(x[0], x[1]); }, m);
    EXPECT_LT(g.norm(), 1e-8);
  }
}

TEST(Bowls, FourDimRegistry) {
  const auto b = bowls_registry(4);
  ASSERT_EQ(b.minimizers.size(), 16u);
  for (const auto& m : b.minimizers) EXPECT_LE(b.eval(m), *b.f_star + b.epsilon);
}

TEST(Camel, OriginValue) { EXPECT_EQ(camel8_eval(Vector::Zero(8)), 2.0); }

// Extended-precision reference values for the 2-d camel.
constexpr double kCamelMin = -1.0316284534898773504;
constexpr double kCamelT = 0.0898420131003181;
constexpr double kCamelE = -0.7126564030207396;

TEST(Camel, SinglePairAtGlobalMinimizer) {
  Vector x = Vector::Zero(8);
  x[4] = kCamelT;
  x[5] = kCamelE;
  EXPECT_NEAR(camel8_eval(x), 2.0 + kCamelMin, 1e-12);
  x[4] = -kCamelT;
  x[5] = -kCamelE;
  EXPECT_NEAR(camel8_eval(x), 2.0 + kCamelMin, 1e-12);
}

TEST(Camel, RegistryHoldsSixteenTolerableMinimizers) {
  const auto b = camel8_registry();
  ASSERT_EQ(b.minimizers.size(), 16u);
  EXPECT_NEAR(*b.f_star, 2.0 + 4.0 * kCamelMin, 1e-12);
  EXPECT_NEAR(b.epsilon, std::abs(2.0 + 4.0 * kCamelMin) / 10.0, 1e-12);
  for (const auto& m : b.minimizers) {
    EXPECT_TRUE(in_unit_cube(m));
    EXPECT_LE(b.eval(m), *b.f_star + 1e-9);
    const Vector x = b.to_native(m);
    for (int l = 0; l < 4; ++l) {
      EXPECT_NEAR(std::abs(x[2 * l]), kCamelT, 1e-9);
      EXPECT_NEAR(x[2 * l] * x[2 * l + 1], kCamelT * kCamelE, 1e-9);
    }
  }
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < i; ++j) EXPECT_GT((b.minimizers[i] - b.minimizers[j]).norm(), 0.1);
}

TEST(Camel, ExcludedLocalMinimaLieOutsideTheBand) {
  const auto b = camel8_registry();
  // Non-global local minima of the 2-d camel, from an independent high-precision catalog.
  const double local_values[] = {-0.2154638243837184, 2.1042503103112577};
  for (double v : local_values) {
    const double f = 2.0 + 3.0 * kCamelMin + v;
    EXPECT_GT(f, *b.f_star + b.epsilon);
  }
  Vector x = Vector::Zero(8);
  for (int l = 0; l < 4; ++l) {
    x[2 * l] = kCamelT;
    x[2 * l + 1] = kCamelE;
  }
  x[0] = 1.7036067149699809;
  x[1] = -0.796083568672625;
  EXPECT_GT(camel8_eval(x), *b.f_star + b.epsilon);
  x[0] = 1.6071047529201974;
  x[1] = 0.568651454884131;
  EXPECT_GT(camel8_eval(x), *b.f_star + b.epsilon);
}

TEST(Camel, CatalogMatchesReference) {
  const auto minima = camel2_local_minima();
  ASSERT_EQ(minima.size(), 6u);
  EXPECT_NEAR(camel2(minima[0][0], minima[0][1]), kCamelMin, 1e-13);
  EXPECT_NEAR(camel2(minima[2][0], minima[2][1]), -0.2154638243837184, 1e-12);
  EXPECT_NEAR(camel2(minima[4][0], minima[4][1]), 2.1042503103112577, 1e-12);
}

TEST(UnitCube, WrapperMatchesNativeEvaluation) {
  Rng rng(4);
  for (const auto& b : {bowls_registry(2), camel8_registry(), rover_registry(RoverEnv{})}) {
    for (int i = 0; i < 100; ++i) {
      Vector x(static_cast<Eigen::Index>(b.dim));
      for (std::size_t k = 0; k < b.dim; ++k) {
        const auto& iv = b.bounds[k];
        x[static_cast<Eigen::Index>(k)] = iv.lo + uniform01(rng) * (iv.hi - iv.lo);
      }
      EXPECT_NEAR(b.eval(b.to_unit(x)), b.native(x), 1e-12 * (1.0 + std::abs(b.native(x)))) << b.name;
    }
  }
}

TEST(UnitCube, SmoothBenchmarksHaveFiniteGradients) {
  Rng rng(5);
  for (const auto& b : {bowls_registry(2), bowls_registry(4), camel8_registry()}) {
    for (int i = 0; i < 20; ++i) {
      const Vector u = 0.01 + 0.98 * uniform_point(b.dim, rng).array();
      EXPECT_TRUE(oracle::fd_gradient([&](const Vector& y) { return b.eval(y); }, u).allFinite());
    }
  }
}

Vector straight_params() { return Vector::Constant(12, (0.75 - 0.05) / 6.0); }

TEST(Rover, StraightPathToTarget) {
  const RoverEnv env;
  EXPECT_NEAR(rover_eval(straight_params(), env), 0.05 * 0.7 * std::sqrt(2.0) - 5.0, 1e-9);
  EXPECT_NEAR(rover_eval(straight_params(), env), -4.950502525316942, 1e-9);
}

TEST(Rover, DegeneratePath) {
  const RoverEnv env;
  const auto P = path_from_params(Vector::Zero(12), env);
  ASSERT_EQ(P.size(), 1000u);
  for (const auto& p : P) EXPECT_EQ(p, env.start);
  EXPECT_NEAR(rover_eval(Vector::Zero(12), env), 100.0 * 0.7 * std::sqrt(2.0) - 5.0, 1e-9);
  EXPECT_NEAR(rover_eval(Vector::Zero(12), env), 93.99494936611665, 1e-9);
}

TEST(Rover, ArcLengthSpacing) {
  const RoverEnv env;
  const auto P = path_from_params(straight_params(), env);
  const double step = (P[1] - P[0]).norm();
  for (std::size_t m = 1; m < P.size(); ++m) EXPECT_NEAR((P[m] - P[m - 1]).norm(), step, 1e-9);
  EXPECT_NEAR((P.back() - env.target).norm(), 0.0, 1e-12);
}

TEST(Rover, BentPathSpacingFollowsArcLength) {
  const RoverEnv env;
  Vector p = Vector::Zero(12);
  p[0] = 0.3;   // right
  p[3] = 0.3;   // up
  p[4] = -0.05; // back left
  const auto P = path_from_params(p, env);
  double total = 0.0;
  for (std::size_t m = 1; m < P.size(); ++m) total += (P[m] - P[m - 1]).norm();
  EXPECT_NEAR(total, 0.65, 1e-3);
  EXPECT_NEAR((P.back() - Eigen::Vector2d(0.3, 0.35)).norm(), 0.0, 1e-12);
}

TEST(Rover, ObstaclePenaltyAlongPath) {
  RoverEnv env;
  env.obstacles.push_back({0.2, 0.2, 0.6, 0.6});
  const double inside = 0.4 * std::sqrt(2.0);
  const double expected = 0.05 * 0.7 * std::sqrt(2.0) + 30.0 * inside - 5.0;
  const double step = 0.7 * std::sqrt(2.0) / 999.0;
  EXPECT_NEAR(rover_eval(straight_params(), env), expected, 30.0 * 2.0 * step);
}

TEST(Rover, ContinuousWithoutObstacles) {
  const RoverEnv env;
  Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    const Vector p = (RoverEnv::kStepLo + (RoverEnv::kStepHi - RoverEnv::kStepLo) * uniform_point(12, rng).array()).matrix();
    const Vector dp = 1e-7 * uniform_point(12, rng);
    EXPECT_NEAR(rover_eval(p + dp, env), rover_eval(p, env), 1e-3);
  }
}

TEST(RoverEnvironment, EmptyObstacleListIsValid) {
  const auto env = rover_env_from_json(nlohmann::json::parse(R"({"M": 500, "obstacles": []})"));
  EXPECT_EQ(env.M, 500);
  EXPECT_TRUE(env.obstacles.empty());
}

TEST(RoverEnvironment, GeneratedObstaclesAreDeterministicAndAvoidEndpoints) {
  const auto j = nlohmann::json::parse(R"({"generate": {"count": 12, "min_size": 0.05, "max_size": 0.3, "seed": 42}})");
  const auto a = rover_env_from_json(j);
  const auto b = rover_env_from_json(j);
  ASSERT_EQ(a.obstacles.size(), 12u);
  for (std::size_t i = 0; i < a.obstacles.size(); ++i) {
    EXPECT_EQ(a.obstacles[i].xmin, b.obstacles[i].xmin);
    EXPECT_EQ(a.obstacles[i].ymax, b.obstacles[i].ymax);
    EXPECT_FALSE(a.obstacles[i].contains(a.start));
    EXPECT_FALSE(a.obstacles[i].contains(a.target));
  }
}

TEST(RoverEnvironment, InfeasibleGenerationFails) {
  const auto j = nlohmann::json::parse(R"({"generate": {"count": 1, "min_size": 0.95, "max_size": 0.98, "seed": 1}})");
  EXPECT_THROW(rover_env_from_json(j), ConfigError);
}

TEST(RoverEnvironment, RejectsObstacleOnStart) {
  const auto j = nlohmann::json::parse(R"({"obstacles": [[0.0, 0.0, 0.1, 0.1]]})");
  EXPECT_THROW(rover_env_from_json(j), ConfigError);
}

TEST(Registry, LookupByName) {
  EXPECT_EQ(benchmark_by_name("bowls2").dim, 2u);
  EXPECT_EQ(benchmark_by_name("bowls4").minimizers.size(), 16u);
  EXPECT_EQ(benchmark_by_name("camel8").dim, 8u);
  const auto rover = benchmark_by_name("rover");
  EXPECT_EQ(rover.dim, 12u);
  EXPECT_EQ(rover.epsilon, 17.0);
  EXPECT_FALSE(rover.f_star);
  EXPECT_NEAR(*rover.f_lower, rover.eval(rover.to_unit(straight_params())), 1e-9);
  EXPECT_THROW(benchmark_by_name("bowlsx"), ConfigError);
  EXPECT_THROW(benchmark_by_name("sphere"), ConfigError);
}

}  // namespace
}  // namespace edubo
