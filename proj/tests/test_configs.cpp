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

#include <edubo/experiment.hpp>

#include <filesystem>

#ifndef EDUBO_CONFIG_DIR
#error "EDUBO_CONFIG_DIR must point at the shipped configs"
#endif

namespace edubo {
namespace {

TEST(ShippedConfigs, AllParseAndNameKnownBenchmarks) {
  std::size_t seen = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(EDUBO_CONFIG_DIR)) {
    if (e.path().extension() != ".json" || e.path().filename() == "rover_env.json") continue;
    SCOPED_TRACE(e.path().string());
    const auto cfg = experiment_from_file(e.path().string());
    const auto bench = benchmark_by_name(cfg.benchmark, cfg.rover_env);
    LoopConfig lc;
    lc.dim = bench.dim;
    lc.n_init = cfg.n_init;
    EXPECT_GE(cfg.n_total, lc.initial_size());
    ++seen;
  }
  EXPECT_GE(seen, 10u);
}

TEST(ShippedConfigs, RoverEnvironmentIsFeasible) {
  const auto env = rover_env_from_file(std::string(EDUBO_CONFIG_DIR) + "/rover_env.json");
  EXPECT_EQ(env.obstacles.size(), 12u);
  EXPECT_EQ(env.M, 1000);
}

}  // namespace
}  // namespace edubo
