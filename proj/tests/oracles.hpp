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
//
// Independent reference implementations used only by the test suites.
// Everything here is deliberately scalar and naive so it shares no code
// path with the library implementations it checks.

#ifndef GENCHAN_TESTS_ORACLES_HPP
#define GENCHAN_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "genchan/neural.hpp"
#include "genchan/pbgc.hpp"

namespace oracles {

// Entry-by-entry channel synthesis with explicit phase arithmetic.
inline genchan::ChannelMatrix scalar_synthesize(const std::vector<genchan::PathParams> &paths,
                                                const genchan::ArrayConfig &cfg) {
  genchan::ChannelMatrix h = genchan::ChannelMatrix::Zero(cfg.n_r, cfg.n_t);
  for (const auto &p : paths) {
    const double norm = 1.0 / std::sqrt(static_cast<double>(cfg.n_r) * cfg.n_t);
    for (int r = 0; r < cfg.n_r; ++r) {
      for (int t = 0; t < cfg.n_t; ++t) {
        // a_r(theta_a)[r] * conj(a_t(theta_d)[t]) scaled by the gain
        const double phase = cfg.u * (r * std::sin(p.aoa) - t * std::sin(p.aod));
        h(r, t) += p.gain * norm * std::complex<double>(std::cos(phase), std::sin(phase));
      }
    }
  }
  return h;
}

// Central finite differences over every element of every parameter.
// `loss` must evaluate the model from scratch (no state left behind).
inline std::vector<Eigen::MatrixXd> finite_difference_grads(
    const std::vector<genchan::Param *> &params, const std::function<double()> &loss,
    double step = 1e-5) {
  std::vector<Eigen::MatrixXd> grads;
  grads.reserve(params.size());
  for (genchan::Param *p : params) {
    Eigen::MatrixXd g(p->value.rows(), p->value.cols());
    for (Eigen::Index i = 0; i < p->value.rows(); ++i) {
      for (Eigen::Index j = 0; j < p->value.cols(); ++j) {
        const double saved = p->value(i, j);
        p->value(i, j) = saved + step;
        const double up = loss();
        p->value(i, j) = saved - step;
        const double down = loss();
        p->value(i, j) = saved;
        g(i, j) = (up - down) / (2.0 * step);
      }
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

// Worst relative disagreement between analytic and finite-difference
// gradients, with an absolute floor so near-zero pairs do not blow up.
inline double max_relative_gradient_error(const std::vector<genchan::Param *> &params,
                                          const std::vector<Eigen::MatrixXd> &fd) {
  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const Eigen::MatrixXd &a = params[k]->grad;
    const Eigen::MatrixXd &b = fd[k];
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const double diff = std::abs(a(i, j) - b(i, j));
        if (diff < 1e-8) continue;
        worst = std::max(worst, diff / std::max({std::abs(a(i, j)), std::abs(b(i, j)), 1e-8}));
      }
    }
  }
  return worst;
}

// Exhaustive minimum-cost assignment for n <= ~8.
inline double brute_force_assignment_cost(const Eigen::MatrixXd &cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (int i = 0; i < n; ++i) c += cost(i, perm[i]);
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// O(n^3) Hungarian algorithm with potentials; an independent check for the
// production solver on instances too large for brute force.
inline double hungarian_assignment_cost(const Eigen::MatrixXd &cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += cost(p[j] - 1, j - 1);
  return total;
}

}  // namespace oracles

#endif
