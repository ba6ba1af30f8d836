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

#ifndef EDUBO_GP_HPP
#define EDUBO_GP_HPP

#include "edubo/box_ascent.hpp"
#include "edubo/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

namespace edubo {

/// Evaluated design points in [0,1]^d with their raw objective values.
struct Dataset {
  std::vector<Vector> points;
  std::vector<double> values;

  [[nodiscard]] std::size_t size() const { return points.size(); }
  [[nodiscard]] std::size_t dim() const { return points.empty() ? 0 : static_cast<std::size_t>(points.front().size()); }
  [[nodiscard]] bool empty() const { return points.empty(); }

  [[nodiscard]] double min_value() const { return *std::min_element(values.begin(), values.end()); }

  /// True when some stored point lies within `tol` (max-norm) of x.
  [[nodiscard]] bool contains_near(const Vector& x, double tol = 0.0) const {
    return std::any_of(points.begin(), points.end(),
                       [&](const Vector& p) { return (p - x).lpNorm<Eigen::Infinity>() <= tol; });
  }

  void validate() const {
    if (points.empty()) throw InputError("dataset is empty");
    if (points.size() != values.size()) throw InputError("dataset has mismatched points/values");
    const auto d = points.front().size();
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& p = points[i];
      if (p.size() != d) throw InputError("dataset points have inconsistent dimension");
      if (!p.allFinite() || !in_unit_cube(p)) throw InputError("dataset point outside [0,1]^d");
      if (!std::isfinite(values[i])) throw InputError("dataset value is not finite");
      for (std::size_t j = 0; j < i; ++j) {
        if (points[j] == p) throw InputError("dataset contains duplicate points");
      }
    }
  }

  /// Appends one observation after validating it against the existing data.
  void add(const Vector& x, double y) {
    if (!empty() && static_cast<std::size_t>(x.size()) != dim()) throw InputError("point dimension mismatch");
    if (!x.allFinite() || !in_unit_cube(x)) throw InputError("point outside [0,1]^d");
    if (!std::isfinite(y)) throw InputError("observation is not finite");
    if (contains_near(x)) throw InputError("duplicate design point");
    points.push_back(x);
    values.push_back(y);
  }

  [[nodiscard]] Matrix design_matrix() const {
    Matrix X(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(dim()));
    for (std::size_t i = 0; i < size(); ++i) X.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
    return X;
  }
};

/// Anisotropic squared-exponential kernel parameters with a constant mean.
/// Inside a GpModel, `mean`, `signal_variance` and `jitter` refer to standardized outputs.
struct KernelParams {
  Vector lengthscales;
  double signal_variance = 1.0;
  double mean = 0.0;
  double jitter = 1e-6;

  void validate() const {
    if (lengthscales.size() == 0 || !lengthscales.allFinite() || (lengthscales.array() <= 0.0).any())
      throw InputError("lengthscales must be finite and positive");
    if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) throw InputError("signal variance must be positive");
    if (!(jitter >= 0.0) || !std::isfinite(jitter)) throw InputError("jitter must be nonnegative");
    if (!std::isfinite(mean)) throw InputError("mean must be finite");
  }
};

/// Gaussian posterior of f at one point, in raw objective units.
struct PosteriorGaussian {
  double mean = 0.0;
  double sd = 0.0;
};

/// Affine map between raw and standardized outputs: raw = shift + scale * standardized.
struct Standardization {
  double shift = 0.0;
  double scale = 1.0;

  static Standardization fit(const std::vector<double>& y) {
    Standardization s;
    const double n = static_cast<double>(y.size());
    for (double v : y) s.shift += v;
    s.shift /= n;
    if (y.size() > 1) {
      double ss = 0.0;
      for (double v : y) ss += (v - s.shift) * (v - s.shift);
      const double sd = std::sqrt(ss / (n - 1.0));
      if (sd >= 1e-12) s.scale = sd;
    }
    return s;
  }

  [[nodiscard]] double to_std(double raw) const { return (raw - shift) / scale; }
  [[nodiscard]] double to_raw(double standardized) const { return shift + scale * standardized; }
};

/// Hyperparameter box for the MAP search.
struct MapBounds {
  double lengthscale_lo = 1e-3;
  double lengthscale_hi = 1e2;
  double variance_lo = 1e-4;
  double variance_hi = 1e3;
};

struct FitOptions {
  int n_restarts = 8;
  MapBounds bounds{};
  AscentOptions ascent{.max_iters = 200, .grad_tol = 1e-6, .memory = 8, .initial_step = 0.1};
  double jitter_start = 1e-8;  // relative to the signal variance
  double jitter_max = 1e-2;
};

inline double kernel_eval(const Vector& x, const Vector& x2, const KernelParams& params) {
  if (!x.allFinite() || !x2.allFinite()) throw InputError("kernel input is not finite");
  if (x.size() != x2.size() || x.size() != params.lengthscales.size()) throw InputError("kernel dimension mismatch");
  const double r2 = ((x - x2).array() / params.lengthscales.array()).square().sum();
  return params.signal_variance * std::exp(-0.5 * r2);
}

/// log Gamma(x; shape, rate) density.
inline double gamma_log_density(double x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

inline constexpr double kVariancePriorShape = 2.0;
inline constexpr double kVariancePriorRate = 0.15;
inline constexpr double kLengthscalePriorShape = 3.0;
inline constexpr double kLengthscalePriorRate = 6.0;

namespace detail {

inline Matrix correlation_matrix(const Matrix& X, const Vector& lengthscales) {
  const Eigen::Index n = X.rows();
  Matrix R(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    R(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r2 = ((X.row(i) - X.row(j)).transpose().array() / lengthscales.array()).square().sum();
      R(i, j) = R(j, i) = std::exp(-0.5 * r2);
    }
  }
  return R;
}

struct MapEvaluation {
  double value = 0.0;
  double mean = 0.0;   // GLS estimate of the constant mean
  Vector gradient;     // w.r.t. (log lengthscales..., log signal variance)
};

/// Log marginal likelihood (mean profiled by GLS) plus log priors, on standardized y.
/// When `jitter_scales` is set the nugget is jitter * signal_variance and moves with it.
inline std::optional<MapEvaluation> evaluate_map(const Matrix& X, const Vector& y, const Vector& lengthscales,
                                                 double signal_variance, double jitter, bool jitter_scales,
                                                 bool want_gradient) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  const Matrix R = correlation_matrix(X, lengthscales);
  const double nugget = jitter_scales ? jitter * signal_variance : jitter;
  Matrix K = signal_variance * R;
  K.diagonal().array() += nugget;
  const Eigen::LLT<Matrix> llt(K);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Matrix& L = llt.matrixLLT();
  if (!(L.diagonal().array() > 0.0).all() || !L.allFinite()) return std::nullopt;

  const Vector ones = Vector::Ones(n);
  const Vector k_inv_one = llt.solve(ones);
  const Vector k_inv_y = llt.solve(y);
  const double mu = ones.dot(k_inv_y) / ones.dot(k_inv_one);
  const Vector resid = y.array() - mu;
  const Vector alpha = llt.solve(resid);

  MapEvaluation out;
  out.mean = mu;
  const double log_det = 2.0 * L.diagonal().array().log().sum();
  out.value = -0.5 * resid.dot(alpha) - 0.5 * log_det - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  out.value += gamma_log_density(signal_variance, kVariancePriorShape, kVariancePriorRate);
  for (Eigen::Index k = 0; k < d; ++k)
    out.value += gamma_log_density(lengthscales[k], kLengthscalePriorShape, kLengthscalePriorRate);
  if (!std::isfinite(out.value)) return std::nullopt;

  if (want_gradient) {
    // The GLS mean maximizes the likelihood, so its own derivative drops out.
    const Matrix W = alpha * alpha.transpose() - llt.solve(Matrix::Identity(n, n));
    const Matrix SR = signal_variance * R;
    out.gradient.resize(d + 1);
    for (Eigen::Index k = 0; k < d; ++k) {
      double acc = 0.0;
      const double inv_l2 = 1.0 / (lengthscales[k] * lengthscales[k]);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
          const double diff = X(i, k) - X(j, k);
          acc += W(i, j) * SR(i, j) * diff * diff * inv_l2;
        }
      }
      // Off-diagonal pairs appear twice in the trace; the 1/2 cancels.
      out.gradient[k] = acc + (kLengthscalePriorShape - 1.0) - kLengthscalePriorRate * lengthscales[k];
    }
    Matrix dK = SR;
    if (jitter_scales) dK.diagonal().array() += nugget;
    out.gradient[d] = 0.5 * (W.cwiseProduct(dK)).sum() + (kVariancePriorShape - 1.0) -
                      kVariancePriorRate * signal_variance;
  }
  return out;
}

inline Vector standardized_values(const Dataset& data, const Standardization& s) {
  Vector y(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) y[static_cast<Eigen::Index>(i)] = s.to_std(data.values[i]);
  return y;
}

}  // namespace detail

/// MAP objective: GP log marginal likelihood of the standardized data (constant mean
/// profiled out by generalized least squares) plus Gamma(2, 0.15) on the signal
/// variance and Gamma(3, 6) on each lengthscale. `params.mean` is ignored and
/// `params.jitter` is an absolute nugget in standardized units.
inline double log_map_objective(const KernelParams& params, const Dataset& data) {
  params.validate();
  data.validate();
  if (static_cast<Eigen::Index>(data.dim()) != params.lengthscales.size())
    throw InputError("kernel/data dimension mismatch");
  const auto st = Standardization::fit(data.values);
  const auto ev = detail::evaluate_map(data.design_matrix(), detail::standardized_values(data, st),
                                       params.lengthscales, params.signal_variance, params.jitter, false, false);
  if (!ev) throw NumericalError("Cholesky factorization failed in MAP objective");
  return ev->value;
}

/// Gradient of log_map_objective w.r.t. (log lengthscales..., log signal variance), nugget held fixed.
inline Vector log_map_gradient(const KernelParams& params, const Dataset& data) {
  params.validate();
  data.validate();
  const auto st = Standardization::fit(data.values);
  const auto ev = detail::evaluate_map(data.design_matrix(), detail::standardized_values(data, st),
                                       params.lengthscales, params.signal_variance, params.jitter, false, true);
  if (!ev) throw NumericalError("Cholesky factorization failed in MAP objective");
  return ev->gradient;
}

/// Conditioned constant-mean GP. Immutable once built; safe to share between readers.
class GpModel {
 public:
  /// Conditions on `data` with fixed standardized-unit params.
  GpModel(Dataset data, KernelParams params, Standardization standardization)
      : data_(std::move(data)), params_(std::move(params)), st_(standardization) {
    data_.validate();
    params_.validate();
    if (static_cast<Eigen::Index>(data_.dim()) != params_.lengthscales.size())
      throw InputError("kernel/data dimension mismatch");
    X_ = data_.design_matrix();
    y_ = detail::standardized_values(data_, st_);
    Matrix K = params_.signal_variance * detail::correlation_matrix(X_, params_.lengthscales);
    K.diagonal().array() += params_.jitter;
    llt_.compute(K);
    if (llt_.info() != Eigen::Success || !llt_.matrixLLT().allFinite())
      throw NumericalError("Cholesky factorization of the kernel matrix failed");
    alpha_ = llt_.solve((y_.array() - params_.mean).matrix());
  }

  /// Conditions on `data` with the GLS mean and the given kernel parameters.
  static GpModel with_profiled_mean(Dataset data, KernelParams params) {
    const auto st = Standardization::fit(data.values);
    data.validate();
    const auto ev = detail::evaluate_map(data.design_matrix(), detail::standardized_values(data, st),
                                         params.lengthscales, params.signal_variance, params.jitter, false, false);
    if (!ev) throw NumericalError("Cholesky factorization of the kernel matrix failed");
    params.mean = ev->mean;
    return GpModel(std::move(data), std::move(params), st);
  }

  [[nodiscard]] const Dataset& data() const { return data_; }
  [[nodiscard]] const KernelParams& params() const { return params_; }
  [[nodiscard]] const Standardization& standardization() const { return st_; }
  [[nodiscard]] Eigen::Index dim() const { return X_.cols(); }
  [[nodiscard]] Matrix cholesky() const { return llt_.matrixL(); }
  [[nodiscard]] const Vector& alpha() const { return alpha_; }

  /// Cross-covariance k_n(x) between x and the training inputs (standardized units).
  [[nodiscard]] Vector cross_cov(const Vector& x) const {
    check_point(x);
    Vector k(X_.rows());
    for (Eigen::Index i = 0; i < X_.rows(); ++i) {
      const double r2 = ((x - X_.row(i).transpose()).array() / params_.lengthscales.array()).square().sum();
      k[i] = params_.signal_variance * std::exp(-0.5 * r2);
    }
    return k;
  }

  /// Prior covariance k(x, x2) in standardized units.
  [[nodiscard]] double prior_cov(const Vector& x, const Vector& x2) const { return kernel_eval(x, x2, params_); }

  /// Posterior mean and variance in standardized units (variance clamped at 0).
  [[nodiscard]] std::pair<double, double> predict_standardized(const Vector& x) const {
    const Vector k = cross_cov(x);
    const double mean = params_.mean + k.dot(alpha_);
    const Vector v = llt_.matrixL().solve(k);
    const double var = std::max(0.0, params_.signal_variance - v.squaredNorm());
    return {mean, var};
  }

  [[nodiscard]] PosteriorGaussian predict(const Vector& x) const {
    const auto [m, v] = predict_standardized(x);
    return {st_.to_raw(m), st_.scale * std::sqrt(v)};
  }

  struct PointGradient {
    PosteriorGaussian post;
    Vector dmean;  // raw units
    Vector dsd;    // raw units; zero where the sd is clamped
  };

  /// Posterior at x with input-gradients of the raw mean and sd.
  [[nodiscard]] PointGradient predict_with_gradient(const Vector& x) const {
    const Vector k = cross_cov(x);
    const Matrix dk = cross_cov_jacobian(x, k);  // n x d
    const Vector w = llt_.solve(k);
    const double mean = params_.mean + k.dot(alpha_);
    const double var = params_.signal_variance - k.dot(w);
    PointGradient out;
    out.dmean = st_.scale * (dk.transpose() * alpha_);
    if (var > 0.0) {
      const double sd = std::sqrt(var);
      out.post = {st_.to_raw(mean), st_.scale * sd};
      out.dsd = st_.scale * (-(dk.transpose() * w) / sd);
    } else {
      out.post = {st_.to_raw(mean), 0.0};
      out.dsd = Vector::Zero(x.size());
    }
    return out;
  }

  /// Joint posterior of f over a batch: raw-unit mean vector and covariance matrix.
  /// The covariance is symmetrized and its eigenvalues clamped at zero.
  [[nodiscard]] std::pair<Vector, Matrix> predict_joint(const std::vector<Vector>& batch) const {
    const auto q = static_cast<Eigen::Index>(batch.size());
    if (q == 0) throw InputError("empty batch");
    Matrix KX(X_.rows(), q);
    Vector mean(q);
    Matrix prior(q, q);
    for (Eigen::Index j = 0; j < q; ++j) {
      KX.col(j) = cross_cov(batch[static_cast<std::size_t>(j)]);
      mean[j] = st_.to_raw(params_.mean + KX.col(j).dot(alpha_));
      for (Eigen::Index i = 0; i <= j; ++i)
        prior(i, j) = prior(j, i) = prior_cov(batch[static_cast<std::size_t>(i)], batch[static_cast<std::size_t>(j)]);
    }
    const Matrix V = llt_.matrixL().solve(KX);
    Matrix cov = prior - V.transpose() * V;
    cov = 0.5 * (cov + cov.transpose());
    if (q == 1) {
      cov(0, 0) = std::max(0.0, cov(0, 0));
    } else {
      const Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
      if (eig.eigenvalues().minCoeff() < 0.0) {
        const Vector lam = eig.eigenvalues().cwiseMax(0.0);
        cov = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
        cov = 0.5 * (cov + cov.transpose());
      }
    }
    return {mean, st_.scale * st_.scale * cov};
  }

  /// Correlations whose standardized sd falls below corr_sd_floor() are reported as 0.
  static constexpr double kCorrSdFloor = 1e-6;

  /// The nugget bounds the sd at a training point by sqrt(jitter), so the floor sits above it.
  [[nodiscard]] double corr_sd_floor() const { return std::max(kCorrSdFloor, 2.0 * std::sqrt(params_.jitter)); }

  /// Posterior correlation of f(x) and f(x2); 0 when either sd is below the floor, else clamped to [-1, 1].
  [[nodiscard]] double posterior_corr(const Vector& x, const Vector& x2) const {
    return posterior_corr_impl(x, x2, nullptr, nullptr);
  }

  /// posterior_corr with gradients w.r.t. both arguments (zero where floored or clamped).
  [[nodiscard]] double posterior_corr(const Vector& x, const Vector& x2, Vector& grad_x, Vector& grad_x2) const {
    return posterior_corr_impl(x, x2, &grad_x, &grad_x2);
  }

 private:
  void check_point(const Vector& x) const {
    if (x.size() != X_.cols()) throw InputError("query point dimension mismatch");
    if (!x.allFinite()) throw InputError("query point is not finite");
  }

  [[nodiscard]] Matrix cross_cov_jacobian(const Vector& x, const Vector& k) const {
    Matrix dk(X_.rows(), X_.cols());
    const Vector inv_l2 = params_.lengthscales.array().square().inverse();
    for (Eigen::Index i = 0; i < X_.rows(); ++i)
      dk.row(i) = (-k[i] * (x - X_.row(i).transpose()).array() * inv_l2.array()).transpose();
    return dk;
  }

  double posterior_corr_impl(const Vector& x, const Vector& x2, Vector* gx, Vector* gx2) const {
    const Eigen::Index d = X_.cols();
    if (gx) *gx = Vector::Zero(d);
    if (gx2) *gx2 = Vector::Zero(d);
    const Vector k1 = cross_cov(x);
    const Vector k2 = cross_cov(x2);
    const Vector w1 = llt_.solve(k1);
    const Vector w2 = llt_.solve(k2);
    const double var1 = params_.signal_variance - k1.dot(w1);
    const double var2 = params_.signal_variance - k2.dot(w2);
    const double floor2 = corr_sd_floor() * corr_sd_floor();
    if (!(var1 >= floor2) || !(var2 >= floor2)) return 0.0;
    const double s1 = std::sqrt(var1);
    const double s2 = std::sqrt(var2);
    const double k12 = prior_cov(x, x2);
    const double c = k12 - k1.dot(w2);
    const double raw = c / (s1 * s2);
    if (raw >= 1.0) return 1.0;
    if (raw <= -1.0) return -1.0;
    if (gx || gx2) {
      const Vector inv_l2 = params_.lengthscales.array().square().inverse();
      const Vector dk12 = (-k12 * (x - x2).array() * inv_l2.array()).matrix();
      const Matrix J1 = cross_cov_jacobian(x, k1);
      const Matrix J2 = cross_cov_jacobian(x2, k2);
      const Vector dc1 = dk12 - J1.transpose() * w2;
      const Vector dc2 = -dk12 - J2.transpose() * w1;
      const Vector ds1 = -(J1.transpose() * w1) / s1;
      const Vector ds2 = -(J2.transpose() * w2) / s2;
      if (gx) *gx = dc1 / (s1 * s2) - raw * ds1 / s1;
      if (gx2) *gx2 = dc2 / (s1 * s2) - raw * ds2 / s2;
    }
    return raw;
  }

  Dataset data_;
  KernelParams params_;
  Standardization st_;
  Matrix X_;
  Vector y_;
  Eigen::LLT<Matrix> llt_;
  Vector alpha_;
};

struct FitDiagnostics {
  std::vector<double> restart_values;  // -inf for failed restarts
  std::vector<double> restart_jitter;  // relative nugget each restart settled on
  int best_restart = -1;
};

/// MAP fit of the kernel hyperparameters by multi-start ascent in log space.
///
/// Restart 0 starts at the prior modes; the others start from log-uniform draws.
/// Each restart begins with a nugget of jitter_start * signal variance and escalates
/// it tenfold on Cholesky failure, up to jitter_max.
inline GpModel fit_map(const Dataset& data, Rng& rng, const FitOptions& opts = {}, FitDiagnostics* diag = nullptr) {
  data.validate();
  if (data.size() < 2) throw InputError("fit_map needs at least two points");
  if (opts.n_restarts < 1) throw InputError("fit_map needs at least one restart");
  const auto d = static_cast<Eigen::Index>(data.dim());
  const auto st = Standardization::fit(data.values);
  const Matrix X = data.design_matrix();
  const Vector y = detail::standardized_values(data, st);

  Vector lo(d + 1);
  Vector hi(d + 1);
  lo.head(d).setConstant(std::log(opts.bounds.lengthscale_lo));
  hi.head(d).setConstant(std::log(opts.bounds.lengthscale_hi));
  lo[d] = std::log(opts.bounds.variance_lo);
  hi[d] = std::log(opts.bounds.variance_hi);

  FitDiagnostics local;
  FitDiagnostics& dg = diag ? *diag : local;
  dg = {};
  double best_value = -std::numeric_limits<double>::infinity();
  Vector best_psi;
  double best_jitter = 0.0;
  std::ostringstream failures;

  for (int r = 0; r < opts.n_restarts; ++r) {
    Rng child = split(rng);
    Vector psi0(d + 1);
    if (r == 0) {
      psi0.head(d).setConstant(std::log((kLengthscalePriorShape - 1.0) / kLengthscalePriorRate));
      psi0[d] = 0.0;
    } else {
      for (Eigen::Index k = 0; k < d; ++k) psi0[k] = std::log(0.05) + uniform01(child) * (std::log(2.0) - std::log(0.05));
      psi0[d] = std::log(0.1) + uniform01(child) * (std::log(10.0) - std::log(0.1));
    }

    double rel_jitter = opts.jitter_start;
    AscentResult res;
    for (;;) {
      const ValueGradFn objective = [&](const Vector& psi, Vector* grad) {
        const Vector ls = psi.head(d).array().exp();
        const double sv = std::exp(psi[d]);
        const auto ev = detail::evaluate_map(X, y, ls, sv, rel_jitter, true, grad != nullptr);
        if (!ev) return -std::numeric_limits<double>::infinity();
        if (grad) *grad = ev->gradient;
        return ev->value;
      };
      res = projected_ascent(objective, psi0, lo, hi, opts.ascent);
      if (res.finite_start || rel_jitter * 10.0 > opts.jitter_max * (1.0 + 1e-12)) break;
      rel_jitter *= 10.0;
    }
    dg.restart_jitter.push_back(rel_jitter);
    if (!res.finite_start) {
      dg.restart_values.push_back(-std::numeric_limits<double>::infinity());
      failures << " restart " << r << ": Cholesky failed up to relative jitter " << rel_jitter << ";";
      continue;
    }
    dg.restart_values.push_back(res.value);
    if (res.value > best_value) {
      best_value = res.value;
      best_psi = res.x;
      best_jitter = rel_jitter;
      dg.best_restart = r;
    }
  }
  if (dg.best_restart < 0) throw NumericalError("fit_map: all restarts failed;" + failures.str());

  KernelParams params;
  params.lengthscales = best_psi.head(d).array().exp();
  params.signal_variance = std::exp(best_psi[d]);
  params.jitter = best_jitter * params.signal_variance;
  const auto ev = detail::evaluate_map(X, y, params.lengthscales, params.signal_variance, params.jitter, false, false);
  if (!ev) throw NumericalError("fit_map: final Cholesky factorization failed");
  params.mean = ev->mean;
  return GpModel(data, params, st);
}

}  // namespace edubo

#endif  // EDUBO_GP_HPP
