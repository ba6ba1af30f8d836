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

#ifndef EDUBO_ACQUISITIONS_HPP
#define EDUBO_ACQUISITIONS_HPP

#include "edubo/box_ascent.hpp"
#include "edubo/core.hpp"
#include "edubo/dual.hpp"
#include "edubo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace edubo {

enum class AcqKind { EI, EDU, Contour, QEDU, QEI, Random };

inline std::string to_string(AcqKind k) {
  switch (k) {
    case AcqKind::EI: return "EI";
    case AcqKind::EDU: return "EDU";
    case AcqKind::Contour: return "Contour";
    case AcqKind::QEDU: return "QEDU";
    case AcqKind::QEI: return "QEI";
    case AcqKind::Random: return "Random";
  }
  return "?";
}

inline AcqKind acq_kind_from_string(const std::string& s) {
  for (auto k : {AcqKind::EI, AcqKind::EDU, AcqKind::Contour, AcqKind::QEDU, AcqKind::QEI, AcqKind::Random})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown acquisition kind '" + s + "'");
}

struct AcquisitionSpec {
  AcqKind kind = AcqKind::EDU;
  double lambda = 0.5;
  int batch_size = 1;
  int mc_samples = 512;

  [[nodiscard]] bool is_batch() const { return kind == AcqKind::QEDU || kind == AcqKind::QEI; }

  void validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be positive");
    if (batch_size < 1) throw ConfigError("batch size must be at least 1");
    if (kind == AcqKind::QEI && mc_samples < 1) throw ConfigError("q-EI needs at least one Monte Carlo sample");
    if (!is_batch() && kind != AcqKind::Random && batch_size != 1)
      throw ConfigError(to_string(kind) + " is a single-point acquisition; use QEDU/QEI for batches");
  }
};

/// Running threshold bookkeeping; all fields in raw objective units.
struct ToleranceState {
  double f_min = 0.0;
  double epsilon = 0.0;
  double gamma = 0.0;

  static ToleranceState make(double f_min, double epsilon) {
    if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
    return {f_min, epsilon, f_min + epsilon};
  }
};

/// Posterior sds below this are treated as deterministic.
inline constexpr double kSdFloor = 1e-12;

template <class T>
struct PartialMomentsT {
  T m0, m1, m2;
};
using PartialMoments = PartialMomentsT<double>;

/// Integrals of (f - mu)^k N(f; mu, sd^2) over [a, b] for k = 0, 1, 2. Either limit may be infinite.
template <class T>
PartialMomentsT<T> partial_moments(const T& a, const T& b, const T& mu, const T& sd) {
  const bool a_inf = std::isinf(value_of(a));
  const bool b_inf = std::isinf(value_of(b));
  const T za = a_inf ? T(0.0) : (a - mu) / sd;
  const T zb = b_inf ? T(0.0) : (b - mu) / sd;
  const T Pa = a_inf ? T(value_of(a) > 0 ? 1.0 : 0.0) : cdf(za);
  const T Pb = b_inf ? T(value_of(b) > 0 ? 1.0 : 0.0) : cdf(zb);
  const T pa = a_inf ? T(0.0) : pdf(za);
  const T pb = b_inf ? T(0.0) : pdf(zb);
  const T apa = a_inf ? T(0.0) : (a - mu) * pa;
  const T bpb = b_inf ? T(0.0) : (b - mu) * pb;
  PartialMomentsT<T> m;
  m.m0 = Pb - Pa;
  m.m1 = sd * (pa - pb);
  m.m2 = sd * (apa - bpb) + sd * sd * m.m0;
  return m;
}

inline PartialMoments gaussian_partial_moments(double a, double b, double mu, double sd) {
  if (std::isnan(a) || std::isnan(b) || !(a < b)) throw InputError("partial moments need a < b");
  if (!(sd > 0.0) || !std::isfinite(sd) || !std::isfinite(mu)) throw InputError("partial moments need finite mu and sd > 0");
  return partial_moments<double>(a, b, mu, sd);
}

// --- Expected improvement ---------------------------------------------------

template <class T>
T ei_value(const T& mu, const T& sd, double f_min, double sd_floor = kSdFloor) {
  const T diff = T(f_min) - mu;
  if (value_of(sd) < sd_floor) return value_of(diff) > 0.0 ? diff : T(0.0);
  const T u = diff / sd;
  return cdf(u) * diff + pdf(u) * sd;
}

inline double ei(const PosteriorGaussian& post, double f_min) { return ei_value<double>(post.mean, post.sd, f_min); }

// --- Diverse utility and its expectation --------------------------------------

/// Piecewise diverse utility of an outcome f; the oracle integrand for edu.
inline double du_utility(double f, const PosteriorGaussian& post, const ToleranceState& tol, double lambda) {
  const double s2 = post.sd * post.sd;
  const double dev = f - tol.gamma;
  if (f < tol.gamma) return lambda * lambda * s2 + s2 * dev * dev;
  if (f <= tol.gamma + lambda * post.sd) return lambda * lambda * s2 - dev * dev;
  return 0.0;
}

/// Closed-form posterior expectation of the diverse utility.
///   EDU = (s^2 + D^2) {(1+s^2) Phi(z) - Phi(z+l)} + D s {(1+s^2) phi(z) - phi(z+l)} + l s^2 {phi(z+l) + l Phi(z+l)}
/// with D = gamma - mu and z = D / s.
template <class T>
T edu_value(const T& mu, const T& sd, double gamma, double lambda, double sd_floor = kSdFloor) {
  if (value_of(sd) < sd_floor) return T(0.0);
  const T D = T(gamma) - mu;
  const T z = D / sd;
  const T zl = z + T(lambda);
  const T s2 = sd * sd;
  const T one_s2 = T(1.0) + s2;
  const T Pz = cdf(z);
  const T Pzl = cdf(zl);
  const T pz = pdf(z);
  const T pzl = pdf(zl);
  const T t1 = (s2 + D * D) * (one_s2 * Pz - Pzl);
  const T t2 = D * sd * (one_s2 * pz - pzl);
  const T t3 = T(lambda) * s2 * (pzl + T(lambda) * Pzl);
  const T out = t1 + t2 + t3;
  return value_of(out) > 0.0 ? out : T(0.0);
}

inline double edu(const PosteriorGaussian& post, const ToleranceState& tol, double lambda) {
  return edu_value<double>(post.mean, post.sd, tol.gamma, lambda);
}

/// d EDU / d lambda, exact derivative of the closed form:
///   2 l Phi(z+l) s^2 + phi(z+l) {(z+l)[D s - l s^2] + (1+l^2) s^2 - (s^2 + D^2)}
inline double edu_dlambda(const PosteriorGaussian& post, const ToleranceState& tol, double lambda) {
  const double s = post.sd;
  if (s < kSdFloor) return 0.0;
  const double D = tol.gamma - post.mean;
  const double zl = D / s + lambda;
  const double s2 = s * s;
  return 2.0 * lambda * norm_cdf(zl) * s2 +
         norm_pdf(zl) * (zl * (D * s - lambda * s2) + (1.0 + lambda * lambda) * s2 - (s2 + D * D));
}

// --- Contour acquisition ----------------------------------------------------

/// Expected contour utility at level gamma: E[(l^2 s^2 - (f-gamma)^2) 1{|f-gamma| <= l s}].
template <class T>
T contour_value(const T& mu, const T& sd, double gamma, double lambda, double sd_floor = kSdFloor) {
  if (value_of(sd) < sd_floor) return T(0.0);
  const T half = T(lambda) * sd;
  const auto m = partial_moments<T>(T(gamma) - half, T(gamma) + half, mu, sd);
  const T off = mu - T(gamma);
  const T out = half * half * m.m0 - (m.m2 + T(2.0) * off * m.m1 + off * off * m.m0);
  return value_of(out) > 0.0 ? out : T(0.0);
}

inline double contour_acq(const PosteriorGaussian& post, const ToleranceState& tol, double lambda) {
  return contour_value<double>(post.mean, post.sd, tol.gamma, lambda);
}

// --- Model-level single-point acquisitions ------------------------------------

namespace detail {

/// Value and input-gradient of a scalar closed form g(mu, sd) composed with the GP posterior.
template <class F>
double through_posterior(const GpModel& model, const Vector& x, Vector* grad, F&& g) {
  const double floor = kSdFloor * model.standardization().scale;
  if (!grad) {
    const auto post = model.predict(x);
    return g(post.mean, post.sd, floor);
  }
  const auto pg = model.predict_with_gradient(x);
  const auto mu = Dual<2>::variable(pg.post.mean, 0);
  const auto sd = Dual<2>::variable(pg.post.sd, 1);
  const Dual<2> out = g(mu, sd, floor);
  *grad = out.d[0] * pg.dmean + out.d[1] * pg.dsd;
  return out.v;
}

}  // namespace detail

inline double ei_at(const GpModel& model, const Vector& x, double f_min, Vector* grad = nullptr) {
  return detail::through_posterior(model, x, grad, [&](auto mu, auto sd, double fl) { return ei_value(mu, sd, f_min, fl); });
}

/// EDU evaluated on the model's standardized output scale. The closed form is not scale-invariant,
/// so this keeps the acquisition independent of the objective's units.
inline double edu_at(const GpModel& model, const Vector& x, const ToleranceState& tol, double lambda,
                     Vector* grad = nullptr) {
  const auto& st = model.standardization();
  const double gamma = st.to_std(tol.gamma);
  return detail::through_posterior(model, x, grad, [&](auto mu, auto sd, double) {
    using T = decltype(mu);
    return edu_value((mu - T(st.shift)) / st.scale, sd / st.scale, gamma, lambda);
  });
}

inline double contour_at(const GpModel& model, const Vector& x, const ToleranceState& tol, double lambda,
                         Vector* grad = nullptr) {
  return detail::through_posterior(
      model, x, grad, [&](auto mu, auto sd, double fl) { return contour_value(mu, sd, tol.gamma, lambda, fl); });
}

// --- Batch acquisitions -----------------------------------------------------

/// q-EDU: [1 - max(0, max_{j != j'} Corr_n(f(x_j), f(x_j')))] * sum_j EDU(x_j); the bracket is 1 for q = 1.
/// Anti-correlated pairs are not rewarded, so the bracket stays in [0, 1].
/// With `grad`, fills the gradient w.r.t. the stacked batch coordinates (active correlation pair only).
inline double q_edu(const GpModel& model, const std::vector<Vector>& batch, const ToleranceState& tol, double lambda,
                    Vector* grad = nullptr) {
  const auto q = batch.size();
  if (q == 0) throw InputError("empty batch");
  const auto d = model.dim();
  double total = 0.0;
  std::vector<Vector> edu_grads(q);
  for (std::size_t j = 0; j < q; ++j) total += edu_at(model, batch[j], tol, lambda, grad ? &edu_grads[j] : nullptr);

  double max_corr = -std::numeric_limits<double>::infinity();
  std::size_t aj = 0;
  std::size_t ak = 0;
  for (std::size_t j = 0; j < q; ++j) {
    for (std::size_t k = j + 1; k < q; ++k) {
      const double c = model.posterior_corr(batch[j], batch[k]);
      if (c > max_corr) {
        max_corr = c;
        aj = j;
        ak = k;
      }
    }
  }
  const bool penalized = q > 1 && max_corr > 0.0;
  const double bracket = penalized ? 1.0 - max_corr : 1.0;
  if (grad) {
    grad->setZero(static_cast<Eigen::Index>(q) * d);
    for (std::size_t j = 0; j < q; ++j) grad->segment(static_cast<Eigen::Index>(j) * d, d) = bracket * edu_grads[j];
    if (penalized) {
      Vector gj;
      Vector gk;
      (void)model.posterior_corr(batch[aj], batch[ak], gj, gk);
      grad->segment(static_cast<Eigen::Index>(aj) * d, d) -= total * gj;
      grad->segment(static_cast<Eigen::Index>(ak) * d, d) -= total * gk;
    }
  }
  return bracket * total;
}

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo q-EI with a fixed set of standard-normal base samples (common random numbers),
/// so repeated evaluations inside one optimizer run are deterministic.
class QeiMonteCarlo {
 public:
  QeiMonteCarlo(std::size_t q, std::size_t n_samples, Rng& rng) : base_(static_cast<Eigen::Index>(n_samples), static_cast<Eigen::Index>(q)) {
    if (q == 0 || n_samples == 0) throw InputError("q-EI needs q >= 1 and at least one sample");
    for (Eigen::Index s = 0; s < base_.rows(); ++s)
      for (Eigen::Index j = 0; j < base_.cols(); ++j) base_(s, j) = standard_normal(rng);
  }

  [[nodiscard]] McEstimate estimate(const GpModel& model, const std::vector<Vector>& batch, double f_min) const {
    if (static_cast<Eigen::Index>(batch.size()) != base_.cols()) throw InputError("batch size does not match base samples");
    const auto [mean, cov] = model.predict_joint(batch);
    const Matrix L = root(cov);
    double sum = 0.0;
    double sum2 = 0.0;
    for (Eigen::Index s = 0; s < base_.rows(); ++s) {
      const Vector f = mean + L * base_.row(s).transpose();
      const double imp = std::max(0.0, f_min - f.minCoeff());
      sum += imp;
      sum2 += imp * imp;
    }
    const double n = static_cast<double>(base_.rows());
    McEstimate e;
    e.value = sum / n;
    e.std_error = n > 1 ? std::sqrt(std::max(0.0, (sum2 / n - e.value * e.value) / (n - 1.0))) : 0.0;
    return e;
  }

 private:
  static Matrix root(const Matrix& cov) {
    const double scale = std::max(cov.diagonal().maxCoeff(), std::numeric_limits<double>::min());
    for (double jitter = 0.0; jitter <= 1e-6; jitter = jitter == 0.0 ? 1e-12 : jitter * 10.0) {
      Matrix c = cov;
      c.diagonal().array() += jitter * scale;
      const Eigen::LLT<Matrix> llt(c);
      if (llt.info() == Eigen::Success && llt.matrixLLT().allFinite()) return llt.matrixL();
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }

  Matrix base_;
};

/// One-shot Monte Carlo q-EI with freshly drawn samples.
inline McEstimate q_ei_mc(const GpModel& model, const std::vector<Vector>& batch, double f_min, std::size_t n_samples,
                          Rng& rng) {
  return QeiMonteCarlo(batch.size(), n_samples, rng).estimate(model, batch, f_min);
}

// --- Optimizer-facing objective ----------------------------------------------

inline std::vector<Vector> unstack(const Vector& flat, Eigen::Index d) {
  std::vector<Vector> out;
  for (Eigen::Index j = 0; j < flat.size() / d; ++j) out.emplace_back(flat.segment(j * d, d));
  return out;
}

inline Vector stack(const std::vector<Vector>& pts) {
  if (pts.empty()) return {};
  const Eigen::Index d = pts.front().size();
  Vector flat(d * static_cast<Eigen::Index>(pts.size()));
  for (std::size_t j = 0; j < pts.size(); ++j) flat.segment(static_cast<Eigen::Index>(j) * d, d) = pts[j];
  return flat;
}

/// Central-difference gradient; steps are shrunk near the unit-box faces to stay inside.
inline Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double hp = std::min(h, 1.0 - x[i]);
    const double hm = std::min(h, x[i]);
    Vector xp = x;
    Vector xm = x;
    xp[i] += hp;
    xm[i] -= hm;
    g[i] = (hp + hm) > 0.0 ? (f(xp) - f(xm)) / (hp + hm) : 0.0;
  }
  return g;
}

/// Acquisition as a value/gradient function over the stacked batch in [0,1]^{q d}.
/// q-EI draws its common random numbers from `rng` once, at construction.
inline ValueGradFn make_acquisition(const AcquisitionSpec& spec, const GpModel& model, const ToleranceState& tol,
                                    Rng& rng) {
  spec.validate();
  const Eigen::Index d = model.dim();
  switch (spec.kind) {
    case AcqKind::EI:
      return [&model, tol](const Vector& x, Vector* g) { return ei_at(model, x, tol.f_min, g); };
    case AcqKind::EDU:
      return [&model, tol, l = spec.lambda](const Vector& x, Vector* g) { return edu_at(model, x, tol, l, g); };
    case AcqKind::Contour:
      return [&model, tol, l = spec.lambda](const Vector& x, Vector* g) { return contour_at(model, x, tol, l, g); };
    case AcqKind::QEDU:
      return [&model, tol, l = spec.lambda, d](const Vector& x, Vector* g) {
        return q_edu(model, unstack(x, d), tol, l, g);
      };
    case AcqKind::QEI: {
      auto mc = std::make_shared<QeiMonteCarlo>(static_cast<std::size_t>(spec.batch_size),
                                                static_cast<std::size_t>(spec.mc_samples), rng);
      return [&model, tol, d, mc](const Vector& x, Vector* g) {
        const auto value = [&](const Vector& y) { return mc->estimate(model, unstack(y, d), tol.f_min).value; };
        if (g) *g = central_difference(value, x);
        return value(x);
      };
    }
    case AcqKind::Random: break;
  }
  throw ConfigError("random sampling has no acquisition function");
}

/// Gradient of the configured acquisition at a point or stacked batch.
inline Vector acq_gradient(const AcquisitionSpec& spec, const GpModel& model, const Vector& x, const ToleranceState& tol,
                           Rng& rng) {
  Vector g;
  make_acquisition(spec, model, tol, rng)(x, &g);
  return g;
}

}  // namespace edubo

#endif  // EDUBO_ACQUISITIONS_HPP
