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

// Replicated-experiment runner: `edubo run <config>` and `edubo aggregate <dir>`.

#include <edubo/experiment.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"Diverse Bayesian optimization experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  unsigned jobs = 1;
  auto* run = app.add_subcommand("run", "Run every replicate and method in a config file");
  run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the base seed");
  run->add_option("--out", out, "Override the output directory");
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string dir;
  auto* agg = app.add_subcommand("aggregate", "Summarize the trace CSVs in a directory");
  agg->add_option("dir", dir, "Directory holding trace_*.csv")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto cfg = edubo::experiment_from_file(config_path);
      if (seed) cfg.seed = *seed;
      if (out) cfg.output = *out;
      const auto res = edubo::run_experiment(cfg, jobs);
      for (const auto& f : res.failures) std::cerr << "failed: " << f << '\n';
      std::cout << res.traces_written << " traces written to " << cfg.output << '\n';
      return res.traces_written > 0 ? 0 : 1;
    }
    const auto rows = edubo::aggregate_dir(dir);
    edubo::write_summary(dir, rows);
    std::cout << rows.size() << " summary rows written to " << dir << '\n';
  } catch (const edubo::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
