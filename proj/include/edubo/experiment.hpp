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

#ifndef EDUBO_EXPERIMENT_HPP
#define EDUBO_EXPERIMENT_HPP

#include "edubo/benchmarks.hpp"
#include "edubo/bo_loop.hpp"
#include "edubo/metrics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace edubo {

struct MethodSpec {
  std::string label;
  AcquisitionSpec acq;
};

struct ExperimentConfig {
  static constexpr int kVersion = 1;

  std::string benchmark;
  std::optional<RoverEnv> rover_env;
  std::vector<MethodSpec> methods;
  std::size_t replicates = 1;
  std::size_t n_init = 0;  // 0 selects the loop default
  std::size_t n_total = 0;
  int q = 1;
  std::uint64_t seed = 0;
  std::optional<double> epsilon;  // overrides the benchmark's rule
  OptimizerConfig optimizer;
  int gp_restarts = 8;
  int grid_resolution = SubregionOracle::kDefaultResolution;
  bool record_timing = false;
  std::string output = "results";

  void validate() const {
    if (replicates < 1) throw ConfigError("replicates must be at least 1");
    if (methods.empty()) throw ConfigError("method list is empty");
    if (q < 1) throw ConfigError("q must be at least 1");
    std::set<std::string> labels;
    for (const auto& m : methods) {
      if (m.label.empty() || m.label.find_first_of("/\\, ") != std::string::npos)
        throw ConfigError("method label '" + m.label + "' must be nonempty without separators");
      if (!labels.insert(m.label).second) throw ConfigError("duplicate method label '" + m.label + "'");
      m.acq.validate();
    }
    if (epsilon && !(*epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (grid_resolution < 16) throw ConfigError("grid_resolution must be at least 16");
  }
};

/// Parses the versioned JSON experiment schema. Relative rover environment paths resolve against `base_dir`.
inline ExperimentConfig experiment_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  ExperimentConfig c;
  try {
    const int version = j.at("version").get<int>();
    if (version != ExperimentConfig::kVersion) throw ConfigError("unsupported config version " + std::to_string(version));
    const auto& b = j.at("benchmark");
    c.benchmark = b.at("name").get<std::string>();
    if (b.contains("env")) c.rover_env = rover_env_from_json(b.at("env"));
    if (b.contains("env_file")) {
      std::filesystem::path p = b.at("env_file").get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      c.rover_env = rover_env_from_file(p.string());
    }
    c.replicates = j.value("replicates", std::size_t{1});
    c.n_init = j.value("n_init", std::size_t{0});
    c.n_total = j.at("n_total").get<std::size_t>();
    c.q = j.value("q", 1);
    c.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("epsilon") && !j.at("epsilon").is_null()) c.epsilon = j.at("epsilon").get<double>();
    if (j.contains("optimizer")) {
      const auto& o = j.at("optimizer");
      c.optimizer.n_restarts = o.value("n_restarts", c.optimizer.n_restarts);
      c.optimizer.max_iters = o.value("max_iters", c.optimizer.max_iters);
      c.optimizer.grad_tol = o.value("grad_tol", c.optimizer.grad_tol);
      c.optimizer.candidates_per_restart = o.value("candidates_per_restart", c.optimizer.candidates_per_restart);
    }
    c.gp_restarts = j.value("gp_restarts", c.gp_restarts);
    c.grid_resolution = j.value("grid_resolution", c.grid_resolution);
    c.record_timing = j.value("record_timing", false);
    c.output = j.value("output", c.output);
    for (const auto& m : j.at("methods")) {
      MethodSpec ms;
      ms.acq.kind = acq_kind_from_string(m.at("kind").get<std::string>());
      ms.acq.lambda = m.value("lambda", ms.acq.lambda);
      ms.acq.mc_samples = m.value("mc_samples", ms.acq.mc_samples);
      ms.acq.batch_size = ms.acq.is_batch() || ms.acq.kind == AcqKind::Random ? c.q : 1;
      ms.label = m.value("label", to_string(ms.acq.kind));
      c.methods.push_back(ms);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

inline ExperimentConfig experiment_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return experiment_from_json(j, std::filesystem::path(path).parent_path());
}

// --- Percentiles and summaries --------------------------------------------

/// Empirical quantile with linear interpolation between order statistics at h = (n - 1) p.
inline double quantile_linear(std::vector<double> v, double p) {
  if (v.empty()) throw InputError("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct Band {
  double mean = 0.0;
  double p25 = 0.0;
  double p75 = 0.0;
};

/// Mean and quartiles; NaN when any entry is NaN (metric unavailable).
inline Band band_of(const std::vector<double>& v) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (v.empty() || std::any_of(v.begin(), v.end(), [](double x) { return std::isnan(x); })) return {nan, nan, nan};
  double s = 0.0;
  for (double x : v) s += x;
  return {s / static_cast<double>(v.size()), quantile_linear(v, 0.25), quantile_linear(v, 0.75)};
}

struct SummaryRow {
  std::string method;
  std::size_t iter = 0;
  std::size_t n = 0;
  Band coverage;
  Band gap;
};

struct TraceTable {
  std::string method;
  std::size_t replicate = 0;
  std::vector<double> coverage;  // per iteration
  std::vector<double> gap;
};

inline std::vector<SummaryRow> summarize(const std::vector<TraceTable>& traces) {
  std::map<std::string, std::vector<const TraceTable*>> by_method;
  std::vector<std::string> order;
  for (const auto& t : traces) {
    if (!by_method.count(t.method)) order.push_back(t.method);
    by_method[t.method].push_back(&t);
  }
  std::vector<SummaryRow> rows;
  for (const auto& m : order) {
    const auto& ts = by_method[m];
    const auto n_iter = ts.front()->coverage.size();
    for (const auto* t : ts)
      if (t->coverage.size() != n_iter) throw InputError("traces for method " + m + " have different lengths");
    for (std::size_t i = 0; i < n_iter; ++i) {
      std::vector<double> cov;
      std::vector<double> gap;
      for (const auto* t : ts) {
        cov.push_back(t->coverage[i]);
        gap.push_back(t->gap[i]);
      }
      rows.push_back({m, i + 1, ts.size(), band_of(cov), band_of(gap)});
    }
  }
  return rows;
}

// --- CSV --------------------------------------------------------------------

inline std::string fmt_num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_num(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw InputError("bad number '" + s + "'");
  return v;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string trace_header(std::size_t d) {
  std::string h = "replicate,method,iter,batch_index";
  for (std::size_t k = 1; k <= d; ++k) h += ",x_" + std::to_string(k);
  return h + ",f,f_min,gamma_n,coverage,gap,wall_ms";
}

inline void write_trace_csv(const std::filesystem::path& path, std::size_t replicate, const std::string& method,
                            const Trace& trace, const std::vector<double>& coverage, const std::vector<double>& gap) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  const auto d = trace.records.empty() ? 0 : static_cast<std::size_t>(trace.records.front().x.size());
  out << trace_header(d) << '\n';
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    out << replicate << ',' << method << ',' << r.iter << ',' << r.round;
    for (Eigen::Index k = 0; k < r.x.size(); ++k) out << ',' << fmt_num(r.x[k]);
    out << ',' << fmt_num(r.f) << ',' << fmt_num(r.f_min) << ',' << fmt_num(r.gamma) << ',' << fmt_num(coverage[i]) << ','
        << fmt_num(gap[i]) << ',' << fmt_num(r.wall_ms) << '\n';
  }
}

inline TraceTable read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  const auto header = split_csv(line);
  const auto col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InputError(path.string() + ": missing column " + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto c_rep = col("replicate");
  const auto c_method = col("method");
  const auto c_cov = col("coverage");
  const auto c_gap = col("gap");
  TraceTable t;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw InputError(path.string() + ": ragged row");
    if (first) {
      t.method = cells[c_method];
      t.replicate = static_cast<std::size_t>(std::stoul(cells[c_rep]));
      first = false;
    }
    t.coverage.push_back(parse_num(cells[c_cov]));
    t.gap.push_back(parse_num(cells[c_gap]));
  }
  if (first) throw InputError(path.string() + ": no rows");
  return t;
}

/// Reads every trace_*.csv in `dir` (sorted by name) and summarizes them.
inline std::vector<SummaryRow> aggregate_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && name.rfind("trace_", 0) == 0 && e.path().extension() == ".csv") files.push_back(e.path());
  }
  if (files.empty()) throw InputError("no trace files in " + dir.string());
  std::sort(files.begin(), files.end());
  std::vector<TraceTable> traces;
  for (const auto& f : files) traces.push_back(read_trace_csv(f));
  return summarize(traces);
}

inline void write_summary(const std::filesystem::path& dir, const std::vector<SummaryRow>& rows) {
  std::ofstream csv(dir / "summary.csv");
  if (!csv) throw ConfigError("cannot write summary in " + dir.string());
  csv << "method,iter,n,coverage_mean,coverage_p25,coverage_p75,gap_mean,gap_p25,gap_p75\n";
  auto arr = nlohmann::json::array();
  for (const auto& r : rows) {
    csv << r.method << ',' << r.iter << ',' << r.n << ',' << fmt_num(r.coverage.mean) << ',' << fmt_num(r.coverage.p25) << ','
        << fmt_num(r.coverage.p75) << ',' << fmt_num(r.gap.mean) << ',' << fmt_num(r.gap.p25) << ',' << fmt_num(r.gap.p75)
        << '\n';
    const auto band = [](const Band& b) {
      return nlohmann::json{{"mean", detail::num_json(b.mean)}, {"p25", detail::num_json(b.p25)}, {"p75", detail::num_json(b.p75)}};
    };
    arr.push_back({{"method", r.method}, {"iter", r.iter}, {"n", r.n}, {"coverage", band(r.coverage)}, {"gap", band(r.gap)}});
  }
  std::ofstream js(dir / "summary.json");
  js << nlohmann::json{{"schema", "edubo.summary/1"}, {"percentile_rule", "linear, h = (n - 1) p"}, {"rows", arr}}.dump(2)
     << '\n';
}

// --- Runner -----------------------------------------------------------------

struct ExperimentResult {
  std::vector<SummaryRow> summary;
  std::vector<std::string> failures;
  std::size_t traces_written = 0;
};

inline std::uint64_t replicate_seed(std::uint64_t base, std::size_t r) { return mix_seed(base, r); }

inline std::uint64_t run_seed(std::uint64_t base, std::size_t r, std::size_t m) {
  return mix_seed(replicate_seed(base, r), m + 1);
}

inline std::string trace_file_name(const std::string& method, std::size_t r) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", r);
  return "trace_" + method + "_r" + buf + ".csv";
}

/// Runs every (replicate, method) cell, writes one trace CSV per completed cell and the summary.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned jobs = 1) {
  cfg.validate();
  const Benchmark bench = benchmark_by_name(cfg.benchmark, cfg.rover_env);
  const double epsilon = cfg.epsilon.value_or(bench.epsilon);
  std::optional<SubregionOracle> oracle;
  if (bench.f_star && !bench.minimizers.empty()) {
    auto gt = GroundTruth::from(bench);
    gt.epsilon = epsilon;
    oracle.emplace(gt, [&bench](const Vector& u) { return bench.eval(u); }, cfg.grid_resolution);
  }
  const std::filesystem::path out_dir(cfg.output);
  std::filesystem::create_directories(out_dir);
  for (const auto& e : std::filesystem::directory_iterator(out_dir)) {
    const auto name = e.path().filename().string();
    if (name.rfind("trace_", 0) == 0 || name.rfind("failed_", 0) == 0) std::filesystem::remove(e.path());
  }

  LoopConfig base;
  base.dim = bench.dim;
  base.n_init = cfg.n_init;
  base.n_total = cfg.n_total;
  base.epsilon = epsilon;
  base.optimizer = cfg.optimizer;
  base.gp_restarts = cfg.gp_restarts;
  base.record_timing = cfg.record_timing;
  std::vector<std::vector<Vector>> designs;
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    Rng rng(replicate_seed(cfg.seed, r));
    designs.push_back(lhs(base.initial_size(), bench.dim, rng));
  }

  const std::size_t n_cells = cfg.replicates * cfg.methods.size();
  std::vector<std::string> failure_of(n_cells);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t cell = next++; cell < n_cells; cell = next++) {
      const std::size_t r = cell / cfg.methods.size();
      const std::size_t m = cell % cfg.methods.size();
      const auto& method = cfg.methods[m];
      try {
        LoopConfig lc = base;
        lc.acq = method.acq;
        lc.initial_design = designs[r];
        lc.n_init = 0;
        lc.seed = run_seed(cfg.seed, r, m);
        const Trace trace = run_bo([&](const Vector& u) { return bench.eval(u); }, lc);
        std::vector<double> values;
        std::vector<Vector> points;
        for (const auto& rec : trace.records) {
          points.push_back(rec.x);
          values.push_back(rec.f);
        }
        const auto coverage = oracle ? coverage_trajectory(points, values, *oracle)
                                     : std::vector<double>(values.size(), std::numeric_limits<double>::quiet_NaN());
        const auto gap = bench.f_star ? optimization_gap(values, *bench.f_star)
                                      : std::vector<double>(values.size(), std::numeric_limits<double>::quiet_NaN());
        const auto name = trace_file_name(method.label, r);
        if (trace.failed) {
          write_trace_csv(out_dir / ("failed_" + name.substr(6)), r, method.label, trace, coverage, gap);
          failure_of[cell] = method.label + " replicate " + std::to_string(r) + ": " + trace.error;
        } else {
          write_trace_csv(out_dir / name, r, method.label, trace, coverage, gap);
        }
      } catch (const std::exception& e) {
        failure_of[cell] = method.label + " replicate " + std::to_string(r) + ": " + e.what();
      }
    }
  };
  jobs = std::max(1U, jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }

  ExperimentResult res;
  for (const auto& f : failure_of)
    if (!f.empty()) res.failures.push_back(f);
  res.traces_written = n_cells - res.failures.size();
  if (res.traces_written > 0) {
    res.summary = aggregate_dir(out_dir);
    write_summary(out_dir, res.summary);
  }
  return res;
}

}  // namespace edubo

#endif  // EDUBO_EXPERIMENT_HPP
