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
// Distribution distances between sets of channel matrices: exact empirical
// 2-Wasserstein distance via optimal linear assignment, and Gaussian-kernel
// maximum mean discrepancy with the median-heuristic bandwidth.

#ifndef GENCHAN_METRICS_HPP
#define GENCHAN_METRICS_HPP

#include <algorithm>
#include <limits>
#include <vector>

#include "genchan/pbgc.hpp"

namespace genchan {

// Flattened real sample vectors, one per row.
struct SampleSet {
  Eigen::MatrixXd vectors;

  static SampleSet from_channels(const std::vector<ChannelMatrix> &channels) {
    if (channels.empty())
      throw std::invalid_argument("SampleSet: needs at least one sample");
    const Eigen::Index dim = 2 * channels.front().rows() * channels.front().cols();
    SampleSet set;
    set.vectors.resize(static_cast<Eigen::Index>(channels.size()), dim);
    for (std::size_t i = 0; i < channels.size(); ++i) {
      if (2 * channels[i].rows() * channels[i].cols() != dim)
        throw std::invalid_argument("SampleSet: channels do not share one shape");
      set.vectors.row(static_cast<Eigen::Index>(i)) = flatten_channel(channels[i]).transpose();
    }
    return set;
  }

  int size() const { return static_cast<int>(vectors.rows()); }
  int dim() const { return static_cast<int>(vectors.cols()); }
};

struct AssignmentResult {
  std::vector<int> col_of_row;
  double cost = 0.0;
  // dual potentials; u(i) + v(j) <= cost(i, j) with equality on assigned pairs
  Eigen::VectorXd u, v;
};

// Dense minimum-cost linear assignment, Jonker-Volgenant algorithm
// (column reduction, reduction transfer, augmenting row reduction, then
// shortest augmenting paths). Exact for finite costs.
inline AssignmentResult solve_assignment(const Eigen::MatrixXd &cost_input) {
  const int n = static_cast<int>(cost_input.rows());
  if (cost_input.cols() != n || n == 0)
    throw std::invalid_argument("solve_assignment: cost matrix must be square and nonempty");
  if (!cost_input.allFinite())
    throw std::invalid_argument("solve_assignment: cost matrix has non-finite entries");

  // row-major copy keeps the inner scans cache-friendly
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> cost = cost_input;
  auto c = [&cost](int i, int j) { return cost(i, j); };

  const double big = std::numeric_limits<double>::max();
  std::vector<int> rowsol(n, -1), colsol(n, -1);
  std::vector<double> v(n, 0.0);
  std::vector<int> free_rows(n, 0), collist(n, 0), pred(n, 0), matches(n, 0);
  std::vector<double> d(n, 0.0);

  // column reduction, scanning columns from the back
  for (int j = n - 1; j >= 0; --j) {
    double min = c(0, j);
    int imin = 0;
    for (int i = 1; i < n; ++i)
      if (c(i, j) < min) {
        min = c(i, j);
        imin = i;
      }
    v[j] = min;
    if (++matches[imin] == 1) {
      rowsol[imin] = j;
      colsol[j] = imin;
    } else {
      colsol[j] = -1;
    }
  }

  // reduction transfer
  int numfree = 0;
  for (int i = 0; i < n; ++i) {
    if (matches[i] == 0) {
      free_rows[numfree++] = i;
    } else if (matches[i] == 1) {
      const int j1 = rowsol[i];
      double min = big;
      for (int j = 0; j < n; ++j)
        if (j != j1 && c(i, j) - v[j] < min) min = c(i, j) - v[j];
      v[j1] -= min;
    }
  }

  // augmenting row reduction, two sweeps
  for (int sweep = 0; sweep < 2; ++sweep) {
    int k = 0;
    const int prvnumfree = numfree;
    numfree = 0;
    while (k < prvnumfree) {
      const int i = free_rows[k++];
      double umin = c(i, 0) - v[0];
      int j1 = 0;
      double usubmin = big;
      int j2 = -1;
      for (int j = 1; j < n; ++j) {
        const double h = c(i, j) - v[j];
        if (h < usubmin) {
          if (h >= umin) {
            usubmin = h;
            j2 = j;
          } else {
            usubmin = umin;
            umin = h;
            j2 = j1;
            j1 = j;
          }
        }
      }
      int i0 = colsol[j1];
      if (umin < usubmin) {
        v[j1] -= usubmin - umin;
      } else if (i0 >= 0) {
        j1 = j2;
        i0 = colsol[j1];
      }
      rowsol[i] = j1;
      colsol[j1] = i;
      if (i0 >= 0) {
        if (umin < usubmin)
          free_rows[--k] = i0;
        else
          free_rows[numfree++] = i0;
      }
    }
  }

  // shortest augmenting paths for the remaining free rows
  for (int f = 0; f < numfree; ++f) {
    const int freerow = free_rows[f];
    for (int j = 0; j < n; ++j) {
      d[j] = c(freerow, j) - v[j];
      pred[j] = freerow;
      collist[j] = j;
    }
    int low = 0, up = 0, last = -1, endofpath = -1;
    double min = 0.0;
    bool unassignedfound = false;
    do {
      if (up == low) {
        last = low - 1;
        min = d[collist[up++]];
        for (int k = up; k < n; ++k) {
          const int j = collist[k];
          const double h = d[j];
          if (h <= min) {
            if (h < min) {
              up = low;
              min = h;
            }
            collist[k] = collist[up];
            collist[up++] = j;
          }
        }
        for (int k = low; k < up; ++k)
          if (colsol[collist[k]] < 0) {
            endofpath = collist[k];
            unassignedfound = true;
            break;
          }
      }
      if (!unassignedfound) {
        const int j1 = collist[low++];
        const int i = colsol[j1];
        const double h = c(i, j1) - v[j1] - min;
        for (int k = up; k < n; ++k) {
          const int j = collist[k];
          const double v2 = c(i, j) - v[j] - h;
          if (v2 < d[j]) {
            pred[j] = i;
            if (v2 == min) {
              if (colsol[j] < 0) {
                endofpath = j;
                unassignedfound = true;
                break;
              }
              collist[k] = collist[up];
              collist[up++] = j;
            }
            d[j] = v2;
          }
        }
      }
    } while (!unassignedfound);

    for (int k = 0; k <= last; ++k) {
      const int j1 = collist[k];
      v[j1] += d[j1] - min;
    }

    int i;
    do {
      i = pred[endofpath];
      colsol[endofpath] = i;
      const int j1 = endofpath;
      endofpath = rowsol[i];
      rowsol[i] = j1;
    } while (i != freerow);
  }

  AssignmentResult result;
  result.col_of_row = rowsol;
  result.u.resize(n);
  result.v.resize(n);
  for (int i = 0; i < n; ++i) {
    result.u(i) = c(i, rowsol[i]) - v[rowsol[i]];
    result.cost += c(i, rowsol[i]);
  }
  for (int j = 0; j < n; ++j) result.v(j) = v[j];
  return result;
}

namespace detail {

// Pairwise squared distances computed term by term; identical rows give an
// exact zero, which keeps the metrics exactly zero on identical sets.
inline Eigen::MatrixXd squared_distance_matrix(const Eigen::MatrixXd &a,
                                               const Eigen::MatrixXd &b) {
  Eigen::MatrixXd d2(a.rows(), b.rows());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      d2(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  return d2;
}

}  // namespace detail

// Exact empirical 2-Wasserstein distance between equal-size sample sets:
// sqrt of the mean squared pairing cost under the optimal assignment.
inline double wasserstein2(const SampleSet &a, const SampleSet &b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("wasserstein2: dimension mismatch");
  if (a.size() != b.size())
    throw std::invalid_argument("wasserstein2: exact method needs equal cardinalities");
  const Eigen::MatrixXd cost = detail::squared_distance_matrix(a.vectors, b.vectors);
  const AssignmentResult assignment = solve_assignment(cost);
  return std::sqrt(std::max(0.0, assignment.cost / static_cast<double>(a.size())));
}

// Biased (V-statistic) MMD with Gaussian kernel k(x, y) = exp(-||x-y||^2 /
// (2 gamma^2)). gamma is the median pairwise distance over the pooled set;
// if that median is zero the result is defined as zero. The bandwidth used
// is written to *bandwidth_out when given.
inline double mmd(const SampleSet &a, const SampleSet &b, double *bandwidth_out = nullptr) {
  if (a.dim() != b.dim()) throw std::invalid_argument("mmd: dimension mismatch");
  const Eigen::Index n = a.vectors.rows(), m = b.vectors.rows();

  // median heuristic over unordered pooled pairs
  const Eigen::Index pooled = n + m;
  std::vector<double> dist(static_cast<std::size_t>(pooled) * (pooled - 1) / 2);
  auto row = [&](Eigen::Index k) {
    return k < n ? a.vectors.row(k) : b.vectors.row(k - n);
  };
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index i = 0; i < pooled; ++i) {
    std::size_t at = static_cast<std::size_t>(i) * pooled - static_cast<std::size_t>(i) * (i + 1) / 2;
    for (Eigen::Index j = i + 1; j < pooled; ++j)
      dist[at++] = std::sqrt((row(i) - row(j)).squaredNorm());
  }
  double gamma = 0.0;
  if (!dist.empty()) {
    const std::size_t mid = dist.size() / 2;
    std::nth_element(dist.begin(), dist.begin() + mid, dist.end());
    gamma = dist[mid];
    if (dist.size() % 2 == 0) {
      const double upper = gamma;
      std::nth_element(dist.begin(), dist.begin() + (mid - 1), dist.begin() + mid);
      gamma = 0.5 * (dist[mid - 1] + upper);
    }
  }
  if (bandwidth_out) *bandwidth_out = gamma;
  if (gamma == 0.0) return 0.0;

  const double inv = 1.0 / (2.0 * gamma * gamma);
  // per-row partials summed sequentially afterwards, so the result does not
  // depend on thread scheduling
  auto kernel_sum = [inv](const Eigen::MatrixXd &x, const Eigen::MatrixXd &y) {
    Eigen::VectorXd row_sums(x.rows());
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      double local = 0.0;
      for (Eigen::Index j = 0; j < y.rows(); ++j)
        local += std::exp(-(x.row(i) - y.row(j)).squaredNorm() * inv);
      row_sums(i) = local;
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) acc += row_sums(i);
    return acc;
  };
  const double t_aa = kernel_sum(a.vectors, a.vectors) / (static_cast<double>(n) * n);
  const double t_bb = kernel_sum(b.vectors, b.vectors) / (static_cast<double>(m) * m);
  const double t_ab = kernel_sum(a.vectors, b.vectors) / (static_cast<double>(n) * m);
  const double mmd2 = t_aa + t_bb - 2.0 * t_ab;
  return std::sqrt(std::max(0.0, mmd2));
}

}  // namespace genchan

#endif
