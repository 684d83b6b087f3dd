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
#include <filesystem>

#include "genchan/dictionary.hpp"
#include "genchan/rng.hpp"
#include "oracles.hpp"

using namespace genchan;

namespace {
const AngleGrid kHalfPlane(-kPi / 2.0, kPi / 2.0, 64);
}

TEST_CASE("grid angles sit at interval midpoints", "[dictionary]") {
  REQUIRE(grid_angle(0, kHalfPlane) == Catch::Approx(-kPi / 2.0 + kPi / 128.0));
  REQUIRE(grid_angle(63, kHalfPlane) == Catch::Approx(kPi / 2.0 - kPi / 128.0));
  // midpoints are symmetric about the grid center
  for (int i = 0; i < 64; ++i)
    REQUIRE(grid_angle(i, kHalfPlane) == Catch::Approx(-grid_angle(63 - i, kHalfPlane)).margin(1e-15));
  REQUIRE_THROWS_AS(grid_angle(-1, kHalfPlane), std::out_of_range);
  REQUIRE_THROWS_AS(grid_angle(64, kHalfPlane), std::out_of_range);
}

TEST_CASE("grid validation", "[dictionary]") {
  REQUIRE_THROWS_AS(AngleGrid(0.5, 0.5, 8), std::invalid_argument);
  REQUIRE_THROWS_AS(AngleGrid(-1.0, 1.0, 1), std::invalid_argument);
  const AngleGrid g(-1.0, 1.0, 10);
  REQUIRE(g.delta == Catch::Approx(0.2));
}

TEST_CASE("dictionary atoms are unit-norm steering outer products", "[dictionary]") {
  const ArrayConfig cfg(2, 2, kPi);
  const AngleGrid grid(-kPi / 2.0, kPi / 2.0, 2);
  const Dictionary dict(grid, cfg);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const ChannelMatrix &atom = dict.atom(i, j);
      REQUIRE(atom.rows() == 2);
      REQUIRE(atom.cols() == 2);
      REQUIRE(atom.norm() == Catch::Approx(1.0).epsilon(1e-14));
      // definitional equivalence with single-path synthesis at gain 1
      const ChannelMatrix ref = synthesize_channel(
          std::vector<PathParams>{{1.0, grid_angle(i, grid), grid_angle(j, grid)}}, cfg);
      REQUIRE((atom - ref).norm() < 1e-15);
    }
}

TEST_CASE("sampled atoms of a large dictionary match the scalar oracle", "[dictionary]") {
  const ArrayConfig cfg(16, 16, kPi);
  const Dictionary dict(kHalfPlane, cfg);
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int i = static_cast<int>(rng.uniform_int(64));
    const int j = static_cast<int>(rng.uniform_int(64));
    const ChannelMatrix oracle = oracles::scalar_synthesize(
        {{1.0, grid_angle(i, kHalfPlane), grid_angle(j, kHalfPlane)}}, cfg);
    REQUIRE((dict.atom(i, j) - oracle).norm() < 1e-13);
  }
}

TEST_CASE("dictionary construction respects the memory budget", "[dictionary]") {
  const ArrayConfig cfg(16, 16, kPi);
  REQUIRE_THROWS_AS(Dictionary(kHalfPlane, cfg, 1024), BudgetError);
}

TEST_CASE("relaxed synthesis selects and combines atoms", "[dictionary]") {
  const ArrayConfig cfg(16, 16, kPi);
  const Dictionary dict(kHalfPlane, cfg);

  GainMatrix w = GainMatrix::Zero(64, 64);
  REQUIRE(relaxed_synthesize(w, dict).norm() == 0.0);

  w(5, 9) = 1.0;
  REQUIRE((relaxed_synthesize(w, dict) - dict.atom(5, 9)).norm() < 1e-14);

  w(5, 9) = 0.01;
  w(40, 12) = 0.003;
  const ChannelMatrix combo = relaxed_synthesize(w, dict);
  const ChannelMatrix expected = synthesize_channel(
      std::vector<PathParams>{{0.01, grid_angle(5, kHalfPlane), grid_angle(9, kHalfPlane)},
                              {0.003, grid_angle(40, kHalfPlane), grid_angle(12, kHalfPlane)}},
      cfg);
  REQUIRE((combo - expected).norm() <= 1e-12 * expected.norm());

  REQUIRE_THROWS_AS(relaxed_synthesize(GainMatrix::Zero(8, 8), dict), std::invalid_argument);
}

TEST_CASE("relaxed synthesis is linear in the gain matrix", "[dictionary]") {
  const ArrayConfig cfg(4, 4, kPi);
  const AngleGrid grid(-kPi / 2.0, kPi / 2.0, 8);
  const Dictionary dict(grid, cfg);
  Rng rng(17);
  GainMatrix a(8, 8), b(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      a(i, j) = rng.uniform(-1.0, 1.0);
      b(i, j) = rng.uniform(-1.0, 1.0);
    }
  const double s = rng.uniform(-2.0, 2.0);
  const ChannelMatrix lhs = relaxed_synthesize(a + s * b, dict);
  const ChannelMatrix rhs = relaxed_synthesize(a, dict) + s * relaxed_synthesize(b, dict);
  REQUIRE((lhs - rhs).norm() < 1e-12 * std::max(1.0, rhs.norm()));
}

TEST_CASE("project_paths accumulates gains at nearest midpoints", "[dictionary]") {
  const AngleGrid grid(-1.0, 1.0, 10);  // delta 0.2, midpoints -0.9, -0.7, ...

  SECTION("exact midpoint hit") {
    const GainMatrix w = project_paths(std::vector<PathParams>{{0.4, -0.9, 0.5}}, grid);
    REQUIRE(w(0, 7) == 0.4);
    REQUIRE(w.cwiseAbs().sum() == 0.4);
  }

  SECTION("two paths in one cell accumulate") {
    const GainMatrix w = project_paths(
        std::vector<PathParams>{{0.4, -0.89, 0.51}, {0.5, -0.91, 0.49}}, grid);
    REQUIRE(w(0, 7) == Catch::Approx(0.9));
  }

  SECTION("cell-boundary tie goes to the lower index") {
    // -0.8 is the boundary between cells 0 and 1
    const GainMatrix w = project_paths(std::vector<PathParams>{{1.0, -0.8, -0.8}}, grid);
    REQUIRE(w(0, 0) == 1.0);
  }

  SECTION("angles outside the grid are rejected") {
    REQUIRE_THROWS_AS(project_paths(std::vector<PathParams>{{1.0, 1.5, 0.0}}, grid),
                      std::invalid_argument);
    // theta_max itself is outside the half-open range
    REQUIRE_THROWS_AS(project_paths(std::vector<PathParams>{{1.0, 0.0, 1.0}}, grid),
                      std::invalid_argument);
  }
}

TEST_CASE("extract_paths finds thresholded local maxima", "[dictionary]") {
  const AngleGrid grid(-1.0, 1.0, 10);

  SECTION("single spike") {
    GainMatrix w = GainMatrix::Zero(10, 10);
    w(3, 6) = 0.02;
    const auto paths = extract_paths(w, grid);
    REQUIRE(paths.size() == 1);
    REQUIRE(paths[0].gain == 0.02);
    REQUIRE(paths[0].aoa == Catch::Approx(grid_angle(3, grid)));
    REQUIRE(paths[0].aod == Catch::Approx(grid_angle(6, grid)));
  }

  SECTION("zero matrix yields empty list") {
    REQUIRE(extract_paths(GainMatrix::Zero(10, 10), grid).empty());
  }

  SECTION("two spikes come back sorted by descending magnitude") {
    GainMatrix w = GainMatrix::Zero(10, 10);
    w(2, 2) = 0.004;
    w(7, 8) = -0.01;
    const auto paths = extract_paths(w, grid, 0.1);
    REQUIRE(paths.size() == 2);
    REQUIRE(paths[0].gain == -0.01);
    REQUIRE(paths[1].gain == 0.004);
  }

  SECTION("relative threshold suppresses small peaks") {
    GainMatrix w = GainMatrix::Zero(10, 10);
    w(2, 2) = 1.0;
    w(7, 8) = 0.05;
    REQUIRE(extract_paths(w, grid, 0.1).size() == 1);
    REQUIRE(extract_paths(w, grid, 0.01).size() == 2);
  }

  SECTION("plateau cells are not strict maxima") {
    GainMatrix w = GainMatrix::Zero(10, 10);
    w(4, 4) = 0.5;
    w(4, 5) = 0.5;
    REQUIRE(extract_paths(w, grid).empty());
  }
}

TEST_CASE("midpoint-aligned paths round-trip through project and synthesize", "[dictionary]") {
  const ArrayConfig cfg(16, 16, kPi);
  const Dictionary dict(kHalfPlane, cfg);
  Rng rng(41);
  std::vector<PathParams> paths;
  for (int p = 0; p < 4; ++p) {
    const int i = static_cast<int>(rng.uniform_int(64));
    const int j = static_cast<int>(rng.uniform_int(64));
    paths.emplace_back(rng.uniform(0.001, 0.01), grid_angle(i, kHalfPlane),
                       grid_angle(j, kHalfPlane));
  }
  const ChannelMatrix via_dictionary = relaxed_synthesize(project_paths(paths, kHalfPlane), dict);
  const ChannelMatrix direct = synthesize_channel(paths, cfg);
  REQUIRE((via_dictionary - direct).norm() <= 1e-10 * direct.norm());
}

TEST_CASE("extract inverts project for separated cells", "[dictionary]") {
  const AngleGrid grid(-kPi / 2.0, kPi / 2.0, 32);
  std::vector<PathParams> truth = {
      {0.01, grid_angle(3, grid), grid_angle(20, grid)},
      {-0.007, grid_angle(10, grid), grid_angle(5, grid)},
      {0.004, grid_angle(25, grid), grid_angle(28, grid)},
  };
  const GainMatrix w = project_paths(truth, grid);
  const auto recovered = extract_paths(w, grid, 0.1);
  REQUIRE(recovered.size() == truth.size());
  // sorted by |gain| descending: 0.01, -0.007, 0.004
  REQUIRE(recovered[0].gain == 0.01);
  REQUIRE(recovered[1].gain == -0.007);
  REQUIRE(recovered[2].gain == 0.004);
  REQUIRE(recovered[0].aoa == grid_angle(3, grid));
  REQUIRE(recovered[0].aod == grid_angle(20, grid));
  REQUIRE(recovered[1].aoa == grid_angle(10, grid));
  REQUIRE(recovered[2].aod == grid_angle(28, grid));
}

TEST_CASE("single-atom fit error decreases as resolution doubles", "[dictionary]") {
  const ArrayConfig cfg(16, 16, kPi);
  // fixed off-grid single path
  Rng rng(4242);
  const PathParams p(rng.uniform(0.5, 1.5), rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2));
  const ChannelMatrix h = synthesize_channel(std::vector<PathParams>{p}, cfg);

  double prev = std::numeric_limits<double>::infinity();
  for (int r : {8, 16, 32, 64}) {
    const AngleGrid grid(-kPi / 2.0, kPi / 2.0, r);
    const Dictionary dict(grid, cfg);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        // least-squares real coefficient for one atom
        const double c = (dict.atom(i, j).conjugate().cwiseProduct(h)).sum().real();
        best = std::min(best, h.squaredNorm() - c * c);
      }
    REQUIRE(best < prev);
    prev = best;
  }
}

TEST_CASE("dictionary cache file round-trips", "[dictionary]") {
  const ArrayConfig cfg(4, 3, kPi);
  const AngleGrid grid(-kPi / 2.0, kPi / 2.0, 6);
  const Dictionary dict(grid, cfg);
  const auto path = std::filesystem::temp_directory_path() / "genchan_dict_test.gdct";
  save_dictionary(dict, path);
  const Dictionary loaded = load_dictionary(path);
  REQUIRE(loaded.resolution() == 6);
  REQUIRE(loaded.config().n_r == 3);
  REQUIRE(loaded.config().n_t == 4);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      REQUIRE(loaded.atom(i, j) == dict.atom(i, j));

  // corrupt the magic; loading must fail with the magic error, not crash
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XXXX", 4);
  }
  REQUIRE_THROWS_AS(load_dictionary(path), MagicError);
  std::filesystem::remove(path);
}
