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

#ifndef EDUBO_BO_LOOP_HPP
#define EDUBO_BO_LOOP_HPP

#include "edubo/acquisitions.hpp"
#include "edubo/core.hpp"
#include "edubo/gp.hpp"
#include "edubo/optimizer.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace edubo {

struct LoopConfig {
  std::size_t dim = 0;
  std::size_t n_init = 0;  // 0 selects 10 d, or 10 when d = 2
  std::size_t n_total = 0;
  AcquisitionSpec acq;
  double epsilon = 0.0;
  OptimizerConfig optimizer;
  int gp_restarts = 8;
  std::uint64_t seed = 0;
  std::vector<Vector> initial_design;  // optional; overrides the internal LHS draw
  bool record_timing = false;

  [[nodiscard]] std::size_t initial_size() const {
    if (!initial_design.empty()) return initial_design.size();
    if (n_init > 0) return n_init;
    return dim == 2 ? 10 : 10 * dim;
  }

  void validate() const {
    if (dim == 0) throw ConfigError("dimension must be positive");
    acq.validate();
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be positive");
    if (gp_restarts < 1) throw ConfigError("gp_restarts must be at least 1");
    if (n_init > 0 && !initial_design.empty() && n_init != initial_design.size())
      throw ConfigError("n_init disagrees with the supplied initial design");
    if (initial_size() < 1) throw ConfigError("need at least one initial point");
    if (initial_size() > n_total) throw ConfigError("n_init exceeds the evaluation budget");
    if (acq.kind != AcqKind::Random && n_total > initial_size() && initial_size() < 2)
      throw ConfigError("model-based acquisitions need at least two initial points");
    for (const auto& x : initial_design)
      if (static_cast<std::size_t>(x.size()) != dim || !in_unit_cube(x)) throw ConfigError("initial design point outside [0,1]^d");
  }
};

struct TraceRecord {
  std::size_t iter = 0;   // 1-based evaluation count
  std::size_t round = 0;  // 0 for the initial design, then one per proposal
  Vector x;
  double f = 0.0;
  double f_min = 0.0;
  double gamma = 0.0;
  double acq_value = std::numeric_limits<double>::quiet_NaN();
  double wall_ms = 0.0;
};

struct Trace {
  std::vector<TraceRecord> records;
  Dataset data;
  bool failed = false;
  std::string error;
  std::size_t gp_fits = 0;
};

/// Tolerability against an elicited lower bound f_L or a known minimum f*: value <= reference + eps.
inline bool tolerable(double value, std::optional<double> f_lower, std::optional<double> f_star, double epsilon) {
  if (f_lower.has_value() == f_star.has_value())
    throw ConfigError("tolerability needs exactly one of a lower bound or the known minimum");
  return value <= (f_lower ? *f_lower : *f_star) + epsilon;
}

/// One optimization campaign driven through ask/tell. Owns its random stream.
class Campaign {
 public:
  static constexpr const char* kSchema = "edubo.campaign/1";
  static constexpr double kDuplicateTol = 1e-9;
  static constexpr double kPerturbation = 1e-6;

  explicit Campaign(LoopConfig cfg) : cfg_(std::move(cfg)), rng_(mix_seed(cfg_.seed)) {
    cfg_.validate();
    initial_ = cfg_.initial_design.empty() ? lhs(cfg_.initial_size(), cfg_.dim, rng_) : cfg_.initial_design;
  }

  [[nodiscard]] const LoopConfig& config() const { return cfg_; }
  [[nodiscard]] const Trace& trace() const { return trace_; }
  [[nodiscard]] const std::vector<Vector>& initial_design() const { return initial_; }
  [[nodiscard]] std::size_t evaluations() const { return trace_.data.size(); }
  [[nodiscard]] bool done() const { return trace_.failed || evaluations() >= cfg_.n_total; }
  [[nodiscard]] const std::vector<Vector>& pending() const { return pending_; }

  /// Points to evaluate next. Repeated calls before tell return the same points; empty when done.
  const std::vector<Vector>& ask() {
    if (!pending_.empty() || done()) return pending_;
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = evaluations();
    if (n < initial_.size()) {
      pending_.assign(initial_.begin() + static_cast<std::ptrdiff_t>(n), initial_.end());
      pending_acq_ = std::numeric_limits<double>::quiet_NaN();
    } else {
      const std::size_t q = std::min<std::size_t>(static_cast<std::size_t>(cfg_.acq.batch_size), cfg_.n_total - n);
      propose(q);
      ++round_;
    }
    pending_ms_ = cfg_.record_timing
                      ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count() /
                            static_cast<double>(pending_.size())
                      : 0.0;
    return pending_;
  }

  /// Records observations. All inputs are validated before any state changes.
  void tell(const std::vector<Vector>& points, const std::vector<double>& values) {
    if (trace_.failed) throw ConfigError("campaign has failed: " + trace_.error);
    if (points.size() != values.size()) throw InputError("points and values differ in length");
    if (evaluations() + points.size() > cfg_.n_total) throw InputError("tell exceeds the evaluation budget");
    Dataset probe = trace_.data;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (static_cast<std::size_t>(points[i].size()) != cfg_.dim) throw InputError("point dimension mismatch");
      probe.add(points[i], values[i]);
    }
    const bool initial_round = evaluations() < initial_.size();
    // Points told without a preceding ask open a round of their own.
    if (!initial_round && pending_.empty()) ++round_;
    for (std::size_t i = 0; i < points.size(); ++i) {
      trace_.data.add(points[i], values[i]);
      TraceRecord r;
      r.iter = evaluations();
      r.round = initial_round ? 0 : round_;
      r.x = points[i];
      r.f = values[i];
      r.f_min = trace_.data.min_value();
      r.gamma = r.f_min + cfg_.epsilon;
      r.acq_value = pending_acq_;
      r.wall_ms = pending_ms_;
      trace_.records.push_back(std::move(r));
      for (auto it = pending_.begin(); it != pending_.end(); ++it) {
        if (*it == points[i]) {
          pending_.erase(it);
          break;
        }
      }
    }
    if (pending_.empty()) pending_acq_ = std::numeric_limits<double>::quiet_NaN();
  }

  void fail(std::string message) {
    trace_.failed = true;
    trace_.error = std::move(message);
    pending_.clear();
  }

  [[nodiscard]] nlohmann::json to_json() const;
  static Campaign from_json(const nlohmann::json& j);

 private:
  Campaign() = default;

  void propose(std::size_t q) {
    const auto d = cfg_.dim;
    if (cfg_.acq.kind == AcqKind::Random) {
      for (std::size_t j = 0; j < q; ++j) pending_.push_back(distinct(uniform_point(d, rng_)));
      pending_acq_ = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    FitOptions fit;
    fit.n_restarts = cfg_.gp_restarts;
    const GpModel model = fit_map(trace_.data, rng_, fit);
    ++trace_.gp_fits;
    const auto tol = ToleranceState::make(trace_.data.min_value(), cfg_.epsilon);
    AcquisitionSpec spec = cfg_.acq;
    spec.batch_size = static_cast<int>(q);
    if (!spec.is_batch() && q != 1) throw ConfigError("single-point acquisition asked for a batch");
    std::vector<Vector> batch;
    double value = 0.0;
    for (int attempt = 0; attempt < 2; ++attempt) {
      const auto acq = make_acquisition(spec, model, tol, rng_);
      const auto res = maximize_batch(acq, q, d, cfg_.optimizer, rng_);
      batch = unstack(res.argmax, static_cast<Eigen::Index>(d));
      value = res.value;
      if (!has_duplicate(batch)) break;
    }
    for (auto& x : batch) {
      x = distinct(clamp_unit(x));
      pending_.push_back(x);
    }
    pending_acq_ = value;
  }

  [[nodiscard]] bool near_existing(const Vector& x) const {
    if (trace_.data.contains_near(x, kDuplicateTol)) return true;
    for (const auto& p : pending_)
      if ((p - x).lpNorm<Eigen::Infinity>() <= kDuplicateTol) return true;
    return false;
  }

  [[nodiscard]] bool has_duplicate(const std::vector<Vector>& batch) const {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (trace_.data.contains_near(batch[i], kDuplicateTol)) return true;
      for (std::size_t j = 0; j < i; ++j)
        if ((batch[i] - batch[j]).lpNorm<Eigen::Infinity>() <= kDuplicateTol) return true;
    }
    return false;
  }

  /// Nudges x by 1e-6 per coordinate, away from the nearest face, until it is clear of known points.
  Vector distinct(Vector x) {
    for (int tries = 0; near_existing(x) && tries < 100; ++tries) {
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double dir = uniform01(rng_) < 0.5 ? -1.0 : 1.0;
        double v = x[k] + dir * kPerturbation;
        if (v < 0.0 || v > 1.0) v = x[k] - dir * kPerturbation;
        x[k] = v;
      }
    }
    if (near_existing(x)) throw NumericalError("could not separate a proposed point from existing data");
    return x;
  }

  LoopConfig cfg_;
  Rng rng_;
  std::vector<Vector> initial_;
  std::vector<Vector> pending_;
  double pending_acq_ = std::numeric_limits<double>::quiet_NaN();
  double pending_ms_ = 0.0;
  std::size_t round_ = 0;
  Trace trace_;
};

namespace detail {

inline nlohmann::json vec_json(const Vector& x) { return to_std(x); }

inline Vector json_vec(const nlohmann::json& j) { return from_std(j.get<std::vector<double>>()); }

inline nlohmann::json vecs_json(const std::vector<Vector>& xs) {
  auto a = nlohmann::json::array();
  for (const auto& x : xs) a.push_back(vec_json(x));
  return a;
}

inline std::vector<Vector> json_vecs(const nlohmann::json& j) {
  std::vector<Vector> out;
  for (const auto& x : j) out.push_back(json_vec(x));
  return out;
}

// NaN is not representable in JSON.
inline nlohmann::json num_json(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline double json_num(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace detail

inline nlohmann::json Campaign::to_json() const {
  using detail::num_json;
  using detail::vec_json;
  using detail::vecs_json;
  nlohmann::json cfg{{"dim", cfg_.dim},
                     {"n_init", cfg_.n_init},
                     {"n_total", cfg_.n_total},
                     {"acquisition",
                      {{"kind", to_string(cfg_.acq.kind)},
                       {"lambda", cfg_.acq.lambda},
                       {"batch_size", cfg_.acq.batch_size},
                       {"mc_samples", cfg_.acq.mc_samples}}},
                     {"epsilon", cfg_.epsilon},
                     {"optimizer",
                      {{"n_restarts", cfg_.optimizer.n_restarts},
                       {"max_iters", cfg_.optimizer.max_iters},
                       {"grad_tol", cfg_.optimizer.grad_tol},
                       {"candidates_per_restart", cfg_.optimizer.candidates_per_restart}}},
                     {"gp_restarts", cfg_.gp_restarts},
                     {"seed", cfg_.seed},
                     {"initial_design", vecs_json(cfg_.initial_design)},
                     {"record_timing", cfg_.record_timing}};
  auto records = nlohmann::json::array();
  for (const auto& r : trace_.records)
    records.push_back({{"iter", r.iter},
                       {"round", r.round},
                       {"x", vec_json(r.x)},
                       {"f", r.f},
                       {"f_min", r.f_min},
                       {"gamma", r.gamma},
                       {"acq_value", num_json(r.acq_value)},
                       {"wall_ms", r.wall_ms}});
  std::ostringstream rng_state;
  rng_state << rng_;
  nlohmann::json standardization = nullptr;
  if (!trace_.data.empty()) {
    const auto st = Standardization::fit(trace_.data.values);
    standardization = {{"shift", st.shift}, {"scale", st.scale}};
  }
  return {{"schema", kSchema},
          {"config", cfg},
          {"initial_design", vecs_json(initial_)},
          {"data", {{"points", vecs_json(trace_.data.points)}, {"values", trace_.data.values}}},
          {"standardization", standardization},
          {"records", records},
          {"pending", vecs_json(pending_)},
          {"pending_acq", num_json(pending_acq_)},
          {"pending_ms", pending_ms_},
          {"round", round_},
          {"gp_fits", trace_.gp_fits},
          {"failed", trace_.failed},
          {"error", trace_.error},
          {"rng", rng_state.str()}};
}

inline Campaign Campaign::from_json(const nlohmann::json& j) {
  using detail::json_num;
  using detail::json_vec;
  using detail::json_vecs;
  try {
    if (j.at("schema").get<std::string>() != kSchema) throw ConfigError("unsupported campaign schema");
    const auto& c = j.at("config");
    Campaign out;
    out.cfg_.dim = c.at("dim").get<std::size_t>();
    out.cfg_.n_init = c.at("n_init").get<std::size_t>();
    out.cfg_.n_total = c.at("n_total").get<std::size_t>();
    const auto& a = c.at("acquisition");
    out.cfg_.acq.kind = acq_kind_from_string(a.at("kind").get<std::string>());
    out.cfg_.acq.lambda = a.at("lambda").get<double>();
    out.cfg_.acq.batch_size = a.at("batch_size").get<int>();
    out.cfg_.acq.mc_samples = a.at("mc_samples").get<int>();
    out.cfg_.epsilon = c.at("epsilon").get<double>();
    const auto& o = c.at("optimizer");
    out.cfg_.optimizer.n_restarts = o.at("n_restarts").get<int>();
    out.cfg_.optimizer.max_iters = o.at("max_iters").get<int>();
    out.cfg_.optimizer.grad_tol = o.at("grad_tol").get<double>();
    out.cfg_.optimizer.candidates_per_restart = o.at("candidates_per_restart").get<int>();
    out.cfg_.gp_restarts = c.at("gp_restarts").get<int>();
    out.cfg_.seed = c.at("seed").get<std::uint64_t>();
    out.cfg_.initial_design = json_vecs(c.at("initial_design"));
    out.cfg_.record_timing = c.at("record_timing").get<bool>();
    out.cfg_.validate();
    out.initial_ = json_vecs(j.at("initial_design"));
    const auto pts = json_vecs(j.at("data").at("points"));
    const auto vals = j.at("data").at("values").get<std::vector<double>>();
    if (pts.size() != vals.size()) throw ConfigError("campaign data is inconsistent");
    for (std::size_t i = 0; i < pts.size(); ++i) out.trace_.data.add(pts[i], vals[i]);
    for (const auto& r : j.at("records")) {
      TraceRecord rec;
      rec.iter = r.at("iter").get<std::size_t>();
      rec.round = r.at("round").get<std::size_t>();
      rec.x = json_vec(r.at("x"));
      rec.f = r.at("f").get<double>();
      rec.f_min = r.at("f_min").get<double>();
      rec.gamma = r.at("gamma").get<double>();
      rec.acq_value = json_num(r.at("acq_value"));
      rec.wall_ms = r.at("wall_ms").get<double>();
      out.trace_.records.push_back(std::move(rec));
    }
    out.pending_ = json_vecs(j.at("pending"));
    out.pending_acq_ = json_num(j.at("pending_acq"));
    out.pending_ms_ = j.at("pending_ms").get<double>();
    out.round_ = j.at("round").get<std::size_t>();
    out.trace_.gp_fits = j.at("gp_fits").get<std::size_t>();
    out.trace_.failed = j.at("failed").get<bool>();
    out.trace_.error = j.at("error").get<std::string>();
    std::istringstream rng_state(j.at("rng").get<std::string>());
    rng_state >> out.rng_;
    if (!rng_state) throw ConfigError("campaign random state is corrupt");
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("campaign state: ") + e.what());
  }
}

using Objective = std::function<double(const Vector&)>;

/// Runs a campaign to completion. A non-finite objective value stops the run with `failed` set.
inline Trace run_campaign(const Objective& objective, Campaign& campaign) {
  while (!campaign.done()) {
    const auto points = campaign.ask();
    if (points.empty()) break;
    std::vector<double> values;
    for (const auto& x : points) {
      const double v = objective(x);
      if (!std::isfinite(v)) {
        campaign.fail("objective returned a non-finite value");
        return campaign.trace();
      }
      values.push_back(v);
    }
    campaign.tell(points, values);
  }
  return campaign.trace();
}

/// Sequential loop: initial design, then one refit and one acquisition maximization per evaluation.
inline Trace run_bo(const Objective& objective, const LoopConfig& cfg) {
  Campaign campaign(cfg);
  return run_campaign(objective, campaign);
}

/// Batch variant: q points per refit, all evaluated before the next refit; the last batch may be shorter.
inline Trace run_batch_bo(const Objective& objective, const LoopConfig& cfg) {
  if (!cfg.acq.is_batch() && cfg.acq.kind != AcqKind::Random && cfg.acq.batch_size > 1)
    throw ConfigError("batch runs need QEDU, QEI or Random");
  return run_bo(objective, cfg);
}

}  // namespace edubo

#endif  // EDUBO_BO_LOOP_HPP
