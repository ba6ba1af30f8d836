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

#include <edubo/gp.hpp>
#include <edubo/optimizer.hpp>

#include "oracles.hpp"

#include <cmath>

namespace edubo {
namespace {

Dataset random_dataset(std::size_t n, std::size_t d, Rng& rng, const std::function<double(const Vector&)>& f) {
  Dataset data;
  for (const auto& x : lhs(n, d, rng)) data.add(x, f(x));
  return data;
}

double smooth_fn(const Vector& x) { return std::sin(3.0 * x[0]) + 0.5 * std::cos(5.0 * x[x.size() - 1]) + x.sum(); }

KernelParams make_params(std::initializer_list<double> ls, double sv, double jitter = 1e-6) {
  KernelParams p;
  p.lengthscales = Vector(static_cast<Eigen::Index>(ls.size()));
  Eigen::Index i = 0;
  for (double l : ls) p.lengthscales[i++] = l;
  p.signal_variance = sv;
  p.jitter = jitter;
  return p;
}

TEST(KernelEval, ZeroDistanceGivesSignalVariance) {
  const auto p = make_params({0.3, 0.7}, 2.5);
  const Vector x = Vector::Constant(2, 0.4);
  EXPECT_DOUBLE_EQ(kernel_eval(x, x, p), 2.5);
}

TEST(KernelEval, UnitLengthscalesSquaredDistanceTwo) {
  const auto p = make_params({1.0, 1.0}, 1.0);
  const Vector a = Vector::Zero(2);
  const Vector b = Vector::Ones(2);
  EXPECT_NEAR(kernel_eval(a, b, p), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(kernel_eval(a, b, p), 0.367879, 1e-6);
}

TEST(KernelEval, AnisotropicExample) {
  const auto p = make_params({0.5, 2.0}, 1.3);
  const Vector a = Vector::Zero(2);
  Vector b(2);
  b << 0.5, 0.5;
  // 1.3 * exp(-(0.5^2/0.5^2 + 0.5^2/4) / 2), evaluated in extended precision.
  EXPECT_NEAR(kernel_eval(a, b, p), 0.764230575059050468, 1e-15);
  EXPECT_DOUBLE_EQ(kernel_eval(a, b, p), kernel_eval(b, a, p));
}

TEST(KernelEval, RejectsNonFinite) {
  const auto p = make_params({1.0}, 1.0);
  Vector a(1);
  a << std::nan("");
  EXPECT_THROW(kernel_eval(a, Vector::Zero(1), p), InputError);
}

TEST(LogMapObjective, GammaLengthscalePriorAtHalf) {
  // log(6^3 / Gamma(3)) + 2 log 0.5 - 3
  EXPECT_NEAR(gamma_log_density(0.5, 3.0, 6.0), 0.295836866004329074, 1e-14);
}

TEST(LogMapObjective, SinglePointIsGaussianPlusPriors) {
  Dataset data;
  Vector x(2);
  x << 0.2, 0.9;
  data.add(x, 3.7);
  const auto p = make_params({0.4, 0.8}, 1.7, 1e-6);
  // Standardized y is 0 and the GLS mean equals it.
  const double expected = -0.5 * std::log(2.0 * M_PI * (1.7 + 1e-6)) + gamma_log_density(1.7, 2.0, 0.15) +
                          gamma_log_density(0.4, 3.0, 6.0) + gamma_log_density(0.8, 3.0, 6.0);
  EXPECT_NEAR(log_map_objective(p, data), expected, 1e-12);
}

TEST(LogMapObjective, JitterSweepOnIllConditionedDataIsContinuous) {
  Rng rng(7);
  Dataset data;
  for (int i = 0; i < 20; ++i) {
    Vector x(2);
    x << 0.5 + 1e-3 * uniform01(rng), 0.5 + 1e-3 * uniform01(rng);
    data.add(x, std::sin(10.0 * x[0]));
  }
  auto p = make_params({0.5, 0.5}, 1.0);
  double prev = std::nan("");
  for (double lj = -6.0; lj <= -2.0 + 1e-12; lj += 0.05) {
    p.jitter = std::pow(10.0, lj);
    double v = 0.0;
    ASSERT_NO_THROW(v = log_map_objective(p, data)) << "jitter " << p.jitter;
    ASSERT_TRUE(std::isfinite(v));
    p.jitter *= 1.0 + 1e-7;
    EXPECT_NEAR(log_map_objective(p, data), v, 1e-5 * (1.0 + std::abs(v)));
    prev = v;
  }
  EXPECT_TRUE(std::isfinite(prev));
}

TEST(LogMapObjective, GradientMatchesCentralDifferences) {
  Rng rng(11);
  const auto data = random_dataset(12, 3, rng, smooth_fn);
  for (int trial = 0; trial < 50; ++trial) {
    KernelParams p;
    p.lengthscales = Vector(3);
    for (int k = 0; k < 3; ++k) p.lengthscales[k] = std::exp(std::log(0.05) + uniform01(rng) * std::log(40.0));
    p.signal_variance = std::exp(std::log(0.1) + uniform01(rng) * std::log(100.0));
    p.jitter = 1e-4;
    const Vector g = log_map_gradient(p, data);
    const double h = 1e-5;
    for (int k = 0; k < 4; ++k) {
      auto pp = p;
      auto pm = p;
      if (k < 3) {
        pp.lengthscales[k] *= std::exp(h);
        pm.lengthscales[k] *= std::exp(-h);
      } else {
        pp.signal_variance *= std::exp(h);
        pm.signal_variance *= std::exp(-h);
      }
      const double fd = (log_map_objective(pp, data) - log_map_objective(pm, data)) / (2.0 * h);
      EXPECT_LT(std::abs(g[k] - fd) / std::max(1.0, std::abs(fd)), 1e-4) << "trial " << trial << " component " << k;
    }
  }
}

TEST(FitMap, RequiresTwoPoints) {
  Dataset data;
  data.add(Vector::Constant(2, 0.5), 1.0);
  Rng rng(1);
  EXPECT_THROW(fit_map(data, rng), InputError);
}

TEST(FitMap, DeterministicGivenSeed) {
  Rng data_rng(3);
  const auto data = random_dataset(15, 2, data_rng, smooth_fn);
  Rng a(42);
  Rng b(42);
  const auto m1 = fit_map(data, a);
  const auto m2 = fit_map(data, b);
  EXPECT_EQ(m1.params().lengthscales, m2.params().lengthscales);
  EXPECT_EQ(m1.params().signal_variance, m2.params().signal_variance);
  EXPECT_EQ(m1.params().mean, m2.params().mean);
}

TEST(FitMap, ConstantOutputsPredictConstant) {
  Rng rng(5);
  const auto data = random_dataset(8, 2, rng, [](const Vector&) { return 4.25; });
  const auto model = fit_map(data, rng);
  for (int i = 0; i < 20; ++i) EXPECT_NEAR(model.predict(uniform_point(2, rng)).mean, 4.25, 1e-12);
}

TEST(FitMap, ReturnedOptimumHasConsistentGradient) {
  Rng rng(9);
  const auto data = random_dataset(15, 2, rng, smooth_fn);
  const auto model = fit_map(data, rng);
  const Vector g = log_map_gradient(model.params(), data);
  const double h = 1e-5;
  for (int k = 0; k < 3; ++k) {
    auto pp = model.params();
    auto pm = model.params();
    if (k < 2) {
      pp.lengthscales[k] *= std::exp(h);
      pm.lengthscales[k] *= std::exp(-h);
    } else {
      pp.signal_variance *= std::exp(h);
      pm.signal_variance *= std::exp(-h);
    }
    const double fd = (log_map_objective(pp, data) - log_map_objective(pm, data)) / (2.0 * h);
    EXPECT_LT(std::abs(g[k] - fd), 1e-4 * std::max(1.0, std::abs(fd)));
  }
}

TEST(FitMap, RecoversLengthscalesOfSampledGp) {
  int within = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(1000 + seed);
    const auto pts = lhs(60, 2, rng);
    const auto truth = make_params({0.3, 0.3}, 1.0);
    Matrix K(60, 60);
    for (int i = 0; i < 60; ++i)
      for (int j = 0; j < 60; ++j) K(i, j) = kernel_eval(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)], truth);
    K.diagonal().array() += 1e-8;
    Vector z(60);
    for (int i = 0; i < 60; ++i) z[i] = standard_normal(rng);
    const Vector y = Eigen::LLT<Matrix>(K).matrixL() * z;
    Dataset data;
    for (int i = 0; i < 60; ++i) data.add(pts[static_cast<std::size_t>(i)], y[i]);
    const auto model = fit_map(data, rng);
    const auto& ls = model.params().lengthscales;
    if ((ls.array() > 0.1).all() && (ls.array() < 0.9).all()) ++within;
  }
  EXPECT_GE(within, 18) << "lengthscales within a factor 3 of truth in " << within << "/20 seeds";
}

class FittedModel : public ::testing::Test {
 protected:
  void SetUp() override {
    Rng rng(21);
    data = random_dataset(10, 2, rng, smooth_fn);
    model.emplace(fit_map(data, rng));
  }
  Dataset data;
  std::optional<GpModel> model;
};

TEST_F(FittedModel, InterpolatesTrainingPoints) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto post = model->predict(data.points[i]);
    EXPECT_LE(std::abs(post.mean - data.values[i]), 1e-6 * (1.0 + std::abs(data.values[i])));
    EXPECT_LE(post.sd / model->standardization().scale, 1e-3);
  }
}

TEST_F(FittedModel, VarianceNeverExceedsPrior) {
  Rng rng(2);
  const double bound = model->params().signal_variance + model->params().jitter;
  for (int i = 0; i < 500; ++i) EXPECT_LE(model->predict_standardized(uniform_point(2, rng)).second, bound);
}

TEST_F(FittedModel, JointAgreesWithPointwiseOnSingletons) {
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const Vector x = uniform_point(2, rng);
    const auto [m, c] = model->predict_joint({x});
    const auto post = model->predict(x);
    EXPECT_NEAR(c(0, 0), post.sd * post.sd, 1e-12);
    EXPECT_NEAR(m[0], post.mean, 1e-12);
  }
}

TEST_F(FittedModel, CholeskyReconstructsKernelMatrix) {
  const Matrix L = model->cholesky();
  Matrix K(10, 10);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) K(i, j) = kernel_eval(data.points[static_cast<std::size_t>(i)], data.points[static_cast<std::size_t>(j)], model->params());
  K.diagonal().array() += model->params().jitter;
  EXPECT_LT((L * L.transpose() - K).norm() / K.norm(), 1e-8);
}

TEST_F(FittedModel, DuplicatedBatchIsFullyCorrelated) {
  const Vector x = Vector::Constant(2, 0.37);
  const auto [m, c] = model->predict_joint({x, x});
  EXPECT_NEAR(c(0, 1) / std::sqrt(c(0, 0) * c(1, 1)), 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(model->posterior_corr(x, x), 1.0);
}

TEST_F(FittedModel, CorrelationAtTrainingPointFollowsFloorRule) {
  EXPECT_EQ(model->posterior_corr(data.points[0], Vector::Constant(2, 0.5)), 0.0);
}

TEST_F(FittedModel, PredictGradientMatchesFiniteDifferences) {
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    const Vector x = 0.05 + 0.9 * uniform_point(2, rng).array();
    const auto pg = model->predict_with_gradient(x);
    const auto fm = [&](const Vector& y) { return model->predict(y).mean; };
    const auto fs = [&](const Vector& y) { return model->predict(y).sd; };
    const Vector gm = oracle::fd_gradient(fm, x);
    const Vector gs = oracle::fd_gradient(fs, x);
    EXPECT_LT((pg.dmean - gm).norm(), 1e-5 * std::max(1.0, gm.norm()));
    EXPECT_LT((pg.dsd - gs).norm(), 1e-5 * std::max(1.0, gs.norm()));
  }
}

TEST_F(FittedModel, CorrelationGradientMatchesFiniteDifferences) {
  Rng rng(10);
  for (int i = 0; i < 20; ++i) {
    const Vector a = 0.05 + 0.9 * uniform_point(2, rng).array();
    const Vector b = 0.05 + 0.9 * uniform_point(2, rng).array();
    Vector ga;
    Vector gb;
    const double c = model->posterior_corr(a, b, ga, gb);
    if (std::abs(c) >= 1.0 || c == 0.0) continue;
    const Vector fa = oracle::fd_gradient([&](const Vector& y) { return model->posterior_corr(y, b); }, a);
    const Vector fb = oracle::fd_gradient([&](const Vector& y) { return model->posterior_corr(a, y); }, b);
    EXPECT_LT((ga - fa).norm(), 1e-5 * std::max(1.0, fa.norm()));
    EXPECT_LT((gb - fb).norm(), 1e-5 * std::max(1.0, fb.norm()));
  }
}

TEST(Predict, MatchesDenseOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    Dataset data;
    for (int i = 0; i < 5; ++i) data.add(uniform_point(3, rng), 4.0 * standard_normal(rng) + 2.0);
    KernelParams p;
    p.lengthscales = 0.3 + 0.7 * uniform_point(3, rng).array();
    p.signal_variance = 0.5 + uniform01(rng);
    p.jitter = 1e-6;
    const auto model = GpModel::with_profiled_mean(data, p);
    const oracle::DenseGp dense(model);
    const auto& st = model.standardization();
    for (int i = 0; i < 10; ++i) {
      const Vector x = uniform_point(3, rng);
      const auto post = model.predict(x);
      EXPECT_NEAR(post.mean, st.to_raw(dense.mean(x)), 1e-10);
      EXPECT_NEAR(post.sd * post.sd, st.scale * st.scale * std::max(0.0, dense.cov(x, x)), 1e-10);
    }
    const Vector a = uniform_point(3, rng);
    const Vector b = uniform_point(3, rng);
    const auto [m, c] = model.predict_joint({a, b});
    EXPECT_NEAR(c(0, 1), st.scale * st.scale * dense.cov(a, b), 1e-10);
    EXPECT_NEAR(c(1, 1), st.scale * st.scale * dense.cov(b, b), 1e-10);
  }
}

TEST(Predict, RevertsToPriorFarFromData) {
  Dataset data;
  data.add(Vector::Zero(2), 1.0);
  data.add(Vector::Ones(2), 3.0);
  const auto model = GpModel::with_profiled_mean(data, make_params({0.01, 0.01}, 0.8));
  const Vector mid = Vector::Constant(2, 0.5);
  ASSERT_LT(model.cross_cov(mid).maxCoeff(), 1e-12);
  const auto [m, v] = model.predict_standardized(mid);
  EXPECT_NEAR(m, model.params().mean, 1e-12);
  EXPECT_NEAR(std::sqrt(v), std::sqrt(0.8), 1e-12);
}

TEST(PosteriorCorr, DistantPointsUnderShortLengthscalesDecorrelate) {
  Rng rng(12);
  Dataset data;
  for (int i = 0; i < 6; ++i) data.add(uniform_point(2, rng), uniform01(rng));
  const auto model = GpModel::with_profiled_mean(data, make_params({0.05, 0.05}, 1.0));
  Vector a(2);
  Vector b(2);
  a << 0.02, 0.03;
  b << 0.97, 0.95;
  const oracle::DenseGp dense(model);
  const double expected = dense.cov(a, b) / std::sqrt(dense.cov(a, a) * dense.cov(b, b));
  EXPECT_LT(std::abs(model.posterior_corr(a, b)), 0.01);
  EXPECT_NEAR(model.posterior_corr(a, b), expected, 1e-10);
}

TEST(Dataset, RejectsDuplicatesAndOutOfRange) {
  Dataset data;
  data.add(Vector::Constant(2, 0.5), 1.0);
  EXPECT_THROW(data.add(Vector::Constant(2, 0.5), 2.0), InputError);
  EXPECT_THROW(data.add(Vector::Constant(2, 1.5), 2.0), InputError);
  EXPECT_THROW(data.add(Vector::Constant(2, 0.2), std::nan("")), InputError);
  EXPECT_EQ(data.size(), 1u);
}

}  // namespace
}  // namespace edubo
