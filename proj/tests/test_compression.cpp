// SPDX-License-Identifier: Apache-2.0
//
// genchan - generative modeling of geometric MIMO wireless channels
// Copyright (C) 2026 genchan contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <catch2/catch_amalgamated.hpp>

#include "genchan/compression.hpp"

using namespace genchan;

namespace {

ChannelDataset tiny_scenario_dataset(double aoa_center, double aod_center, int count,
                                     std::uint64_t seed) {
  ScenarioSpec spec;
  spec.array = ArrayConfig(8, 8, kPi);
  spec.name = "unit";
  spec.paths = {PathDistribution(0.001, 0.01, aoa_center - 0.15, aoa_center + 0.15,
                                 aod_center - 0.15, aod_center + 0.15)};
  return generate_dataset(spec, count, seed);
}

CompressorConfig quick_config(std::uint64_t seed) {
  CompressorConfig config;
  config.bottleneck_dim = 8;
  config.widths = {32};
  config.epochs = 60;
  config.batch_size = 32;
  config.learning_rate = 3e-3;
  config.seed = seed;
  return config;
}

}  // namespace

TEST_CASE("constant dataset is memorized", "[compression]") {
  ChannelDataset ds = tiny_scenario_dataset(0.4, -0.3, 1, 3);
  // repeat one channel
  ds.channels.assign(64, ds.channels.front());
  ds.truth.reset();
  CompressorConfig config = quick_config(5);
  config.epochs = 100;
  CompressorModel model = train_compressor(ds, config);
  REQUIRE(model.history.back().nmse < 1e-3);
  REQUIRE(compressor_nmse(model, ds.channels) < 1e-3);
}

TEST_CASE("training is reproducible for a fixed seed", "[compression]") {
  const ChannelDataset ds = tiny_scenario_dataset(0.2, 0.5, 48, 11);
  CompressorConfig config = quick_config(21);
  config.epochs = 10;
  CompressorModel a = train_compressor(ds, config);
  CompressorModel b = train_compressor(ds, config);
  REQUIRE(a.history.back().nmse == b.history.back().nmse);
  REQUIRE(compressor_nmse(a, ds.channels) == compressor_nmse(b, ds.channels));
}

TEST_CASE("compressor validates its inputs", "[compression]") {
  const ChannelDataset ds = tiny_scenario_dataset(0.2, 0.5, 8, 1);
  CompressorConfig config = quick_config(1);
  config.bottleneck_dim = 4096;  // >= in_dim
  REQUIRE_THROWS_AS(train_compressor(ds, config), std::invalid_argument);
  ChannelDataset empty;
  REQUIRE_THROWS_AS(train_compressor(empty, quick_config(1)), std::invalid_argument);
}

TEST_CASE("cross evaluation favors the matched distribution", "[compression]") {
  // two disjoint single-path scenarios
  const ChannelDataset train_a = tiny_scenario_dataset(-0.8, -0.8, 192, 31);
  const ChannelDataset train_b = tiny_scenario_dataset(0.8, 0.8, 192, 32);
  const ChannelDataset test_a = tiny_scenario_dataset(-0.8, -0.8, 96, 33);
  const ChannelDataset test_b = tiny_scenario_dataset(0.8, 0.8, 96, 34);

  CompressorConfig config = quick_config(41);
  config.epochs = 120;
  const std::vector<NamedDataset> trains = {{"a", &train_a}, {"b", &train_b}};
  const std::vector<NamedDataset> tests = {{"a", &test_a}, {"b", &test_b}};
  const CrossEvalResult result = cross_evaluate(trains, tests, config, 2);

  REQUIRE(result.nmse.rows() == 2);
  REQUIRE(result.nmse.cols() == 2);
  // matched pairs beat mismatched pairs in each row
  REQUIRE(result.nmse(0, 0) < result.nmse(0, 1));
  REQUIRE(result.nmse(1, 1) < result.nmse(1, 0));

  // the matrix does not depend on the job count
  const CrossEvalResult serial = cross_evaluate(trains, tests, config, 1);
  REQUIRE(result.nmse == serial.nmse);

  const auto path = std::filesystem::temp_directory_path() / "genchan_crosseval.csv";
  write_cross_eval_csv(result, path);
  std::ifstream is(path);
  std::string header;
  std::getline(is, header);
  REQUIRE(header == "train\\test,a,b");
  std::filesystem::remove(path);
}
