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

#include "genchan/metrics.hpp"
#include "genchan/rng.hpp"
#include "oracles.hpp"

using namespace genchan;

namespace {

SampleSet random_set(int n, int dim, Rng &rng, double scale = 1.0, double shift = 0.0) {
  SampleSet s;
  s.vectors.resize(n, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) s.vectors(i, j) = shift + scale * rng.normal();
  return s;
}

// independent scalar MMD: full sort for the median, naive double loops
double mmd_oracle(const SampleSet &a, const SampleSet &b) {
  const int n = a.size(), m = b.size();
  Eigen::MatrixXd pooled(n + m, a.dim());
  pooled.topRows(n) = a.vectors;
  pooled.bottomRows(m) = b.vectors;
  std::vector<double> dist;
  for (int i = 0; i < n + m; ++i)
    for (int j = i + 1; j < n + m; ++j)
      dist.push_back((pooled.row(i) - pooled.row(j)).norm());
  std::sort(dist.begin(), dist.end());
  double gamma;
  if (dist.size() % 2 == 1)
    gamma = dist[dist.size() / 2];
  else
    gamma = 0.5 * (dist[dist.size() / 2 - 1] + dist[dist.size() / 2]);
  if (gamma == 0.0) return 0.0;
  auto k = [gamma](const Eigen::RowVectorXd &x, const Eigen::RowVectorXd &y) {
    return std::exp(-(x - y).squaredNorm() / (2.0 * gamma * gamma));
  };
  double kaa = 0.0, kbb = 0.0, kab = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) kaa += k(a.vectors.row(i), a.vectors.row(j));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) kbb += k(b.vectors.row(i), b.vectors.row(j));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) kab += k(a.vectors.row(i), b.vectors.row(j));
  const double mmd2 = kaa / (double(n) * n) + kbb / (double(m) * m) - 2.0 * kab / (double(n) * m);
  return std::sqrt(std::max(0.0, mmd2));
}

}  // namespace

TEST_CASE("assignment solver matches brute force up to n = 7", "[metrics]") {
  Rng rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(6));
    Eigen::MatrixXd cost(n, n);
    const bool integer_costs = trial % 3 == 0;  // force ties regularly
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        cost(i, j) = integer_costs ? static_cast<double>(rng.uniform_int(5))
                                   : rng.uniform(-10.0, 10.0);
    const AssignmentResult r = solve_assignment(cost);
    const double expected = oracles::brute_force_assignment_cost(cost);
    REQUIRE(r.cost == Catch::Approx(expected).margin(1e-9));

    // the result must be a permutation
    std::vector<int> seen(n, 0);
    for (int i = 0; i < n; ++i) seen.at(r.col_of_row[i])++;
    for (int j = 0; j < n; ++j) REQUIRE(seen[j] == 1);
  }
}

TEST_CASE("assignment solver agrees with an independent Hungarian oracle", "[metrics]") {
  Rng rng(405);
  for (int n : {20, 50, 120}) {
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) cost(i, j) = rng.uniform(0.0, 100.0);
    const AssignmentResult r = solve_assignment(cost);
    const double expected = oracles::hungarian_assignment_cost(cost);
    REQUIRE(r.cost == Catch::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("assignment duals certify optimality", "[metrics]") {
  Rng rng(406);
  const int n = 200;
  Eigen::MatrixXd cost(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cost(i, j) = rng.uniform(0.0, 10.0);
  const AssignmentResult r = solve_assignment(cost);
  // dual feasibility: u_i + v_j <= c_ij, equality on the assignment
  for (int i = 0; i < n; ++i) {
    REQUIRE(r.u(i) + r.v(r.col_of_row[i]) == Catch::Approx(cost(i, r.col_of_row[i])).margin(1e-9));
    for (int j = 0; j < n; ++j) REQUIRE(r.u(i) + r.v(j) <= cost(i, j) + 1e-9);
  }
  // feasible duals bound the optimum from below, so equality certifies it
  REQUIRE(r.cost == Catch::Approx(r.u.sum() + r.v.sum()).margin(1e-6));
}

TEST_CASE("wasserstein2 basics", "[metrics]") {
  Rng rng(7);

  SECTION("identical sets give exactly zero") {
    const SampleSet a = random_set(9, 6, rng);
    REQUIRE(wasserstein2(a, a) == 0.0);
  }

  SECTION("singletons reduce to the euclidean distance") {
    SampleSet a, b;
    a.vectors.resize(1, 3);
    b.vectors.resize(1, 3);
    a.vectors << 1.0, 2.0, 2.0;
    b.vectors << 1.0, -1.0, 6.0;
    REQUIRE(wasserstein2(a, b) == Catch::Approx(5.0).epsilon(1e-14));
  }

  SECTION("five random 4-vectors match exhaustive permutation search") {
    for (int trial = 0; trial < 10; ++trial) {
      const SampleSet a = random_set(5, 4, rng);
      const SampleSet b = random_set(5, 4, rng);
      const Eigen::MatrixXd cost = [&] {
        Eigen::MatrixXd m(5, 5);
        for (int i = 0; i < 5; ++i)
          for (int j = 0; j < 5; ++j)
            m(i, j) = (a.vectors.row(i) - b.vectors.row(j)).squaredNorm();
        return m;
      }();
      const double expected = std::sqrt(oracles::brute_force_assignment_cost(cost) / 5.0);
      REQUIRE(wasserstein2(a, b) == Catch::Approx(expected).epsilon(1e-12));
    }
  }

  SECTION("symmetry") {
    const SampleSet a = random_set(8, 5, rng);
    const SampleSet b = random_set(8, 5, rng, 2.0, 0.5);
    REQUIRE(wasserstein2(a, b) == Catch::Approx(wasserstein2(b, a)).epsilon(1e-12));
  }

  SECTION("triangle inequality on random triples") {
    for (int trial = 0; trial < 5; ++trial) {
      const SampleSet a = random_set(6, 4, rng);
      const SampleSet b = random_set(6, 4, rng, 1.5);
      const SampleSet c = random_set(6, 4, rng, 0.5, 1.0);
      REQUIRE(wasserstein2(a, c) <= wasserstein2(a, b) + wasserstein2(b, c) + 1e-9);
    }
  }

  SECTION("input validation") {
    const SampleSet a = random_set(4, 3, rng);
    const SampleSet b = random_set(5, 3, rng);
    const SampleSet c = random_set(4, 2, rng);
    REQUIRE_THROWS_AS(wasserstein2(a, b), std::invalid_argument);
    REQUIRE_THROWS_AS(wasserstein2(a, c), std::invalid_argument);
  }
}

TEST_CASE("mmd basics", "[metrics]") {
  Rng rng(8);

  SECTION("identical sets give exactly zero") {
    const SampleSet a = random_set(12, 6, rng);
    REQUIRE(mmd(a, a) == 0.0);
  }

  SECTION("all points identical across both sets give zero, not an error") {
    SampleSet a, b;
    a.vectors = Eigen::MatrixXd::Constant(3, 4, 2.5);
    b.vectors = Eigen::MatrixXd::Constant(5, 4, 2.5);
    double bandwidth = -1.0;
    REQUIRE(mmd(a, b, &bandwidth) == 0.0);
    REQUIRE(bandwidth == 0.0);
  }

  SECTION("well-separated point masses approach the sqrt(2) supremum") {
    // sizes 6 and 3 put the pooled median exactly between the within-cluster
    // scale and the cluster separation, so gamma lands near half the
    // separation: self-kernels are ~1 and the cross kernel is exp(-2)
    SampleSet a, b;
    a.vectors.resize(6, 2);
    b.vectors.resize(3, 2);
    Rng jitter(9);
    for (int i = 0; i < 6; ++i) {
      a.vectors(i, 0) = 1e-6 * jitter.normal();
      a.vectors(i, 1) = 1e-6 * jitter.normal();
    }
    for (int i = 0; i < 3; ++i) {
      b.vectors(i, 0) = 1e6 + 1e-6 * jitter.normal();
      b.vectors(i, 1) = 1e-6 * jitter.normal();
    }
    const double value = mmd(a, b);
    const double cap = std::sqrt(2.0 - 2.0 * std::exp(-2.0));
    REQUIRE(value > 1.25);
    REQUIRE(value == Catch::Approx(cap).margin(1e-3));
    REQUIRE(value < std::sqrt(2.0));
  }

  SECTION("matches the scalar double-loop oracle") {
    for (int trial = 0; trial < 5; ++trial) {
      const SampleSet a = random_set(7 + trial, 5, rng);
      const SampleSet b = random_set(6, 5, rng, 1.3, 0.4);
      REQUIRE(mmd(a, b) == Catch::Approx(mmd_oracle(a, b)).margin(1e-12));
    }
  }

  SECTION("symmetry") {
    const SampleSet a = random_set(10, 4, rng);
    const SampleSet b = random_set(6, 4, rng, 2.0);
    REQUIRE(mmd(a, b) == Catch::Approx(mmd(b, a)).margin(1e-14));
  }

  SECTION("dimension mismatch is rejected") {
    const SampleSet a = random_set(4, 3, rng);
    const SampleSet b = random_set(4, 2, rng);
    REQUIRE_THROWS_AS(mmd(a, b), std::invalid_argument);
  }
}

TEST_CASE("sample sets flatten channels with the documented layout", "[metrics]") {
  Rng rng(10);
  const ArrayConfig cfg(3, 2, kPi);
  std::vector<ChannelMatrix> channels;
  for (int i = 0; i < 4; ++i)
    channels.push_back(
        synthesize_channel(std::vector<PathParams>{{rng.uniform(0.5, 1.0), 0.3, -0.2}}, cfg));
  const SampleSet set = SampleSet::from_channels(channels);
  REQUIRE(set.size() == 4);
  REQUIRE(set.dim() == 12);
  REQUIRE(set.vectors(1, 1) == channels[1](0, 1).real());
  REQUIRE(set.vectors(1, 6 + 1) == channels[1](0, 1).imag());
  REQUIRE_THROWS_AS(SampleSet::from_channels({}), std::invalid_argument);
}
