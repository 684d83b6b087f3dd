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
// Loss-surface exploration over (aoa, aod) for a single-path channel, with
// flatness and optimality-gap summaries.

#ifndef GENCHAN_ANALYSIS_HPP
#define GENCHAN_ANALYSIS_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <vector>

#include "genchan/pbgc.hpp"

namespace genchan {

struct SurfaceGrid {
  Eigen::MatrixXd values;    // G x G MSE losses; row = arrival index, col = departure index
  std::vector<double> axis;  // G angles, strictly increasing, shared by both dimensions
  PathParams reference;      // the true (gain, aoa, aod)
  ArrayConfig config;
};

// values(i, j) = || g * a_r(axis[i]) a_t(axis[j])^H - H* ||_F^2 with the
// candidate gain pinned to the true gain. With pin_truth set, the axis nodes
// nearest the true angles are moved exactly onto them, making the surface
// minimum exactly zero there.
//
// Both Frobenius norms factor through the steering-vector correlations, so
// each node costs O(1) after an O(G n) precomputation.
inline SurfaceGrid loss_surface(const PathParams &true_params, const ArrayConfig &config,
                                std::pair<double, double> axis_range, int grid_points,
                                bool pin_truth = false) {
  if (grid_points < 8) throw std::invalid_argument("loss_surface: need at least 8 grid points");
  if (!(axis_range.first < axis_range.second))
    throw std::invalid_argument("loss_surface: empty axis range");

  SurfaceGrid surface;
  surface.reference = true_params;
  surface.config = config;
  surface.axis.resize(grid_points);
  const double step = (axis_range.second - axis_range.first) / (grid_points - 1);
  for (int k = 0; k < grid_points; ++k) surface.axis[k] = axis_range.first + k * step;
  if (pin_truth) {
    auto pin = [&](double target) {
      int nearest = 0;
      for (int k = 1; k < grid_points; ++k)
        if (std::abs(surface.axis[k] - target) < std::abs(surface.axis[nearest] - target))
          nearest = k;
      surface.axis[nearest] = target;
    };
    pin(true_params.aoa);
    pin(true_params.aod);
  }

  const Eigen::VectorXcd ar_true = array_response_rx(true_params.aoa, config);
  const Eigen::VectorXcd at_true = array_response_tx(true_params.aod, config);
  Eigen::VectorXcd cr(grid_points), ct(grid_points);
  for (int k = 0; k < grid_points; ++k) {
    cr(k) = array_response_rx(surface.axis[k], config).dot(ar_true);
    ct(k) = array_response_tx(surface.axis[k], config).dot(at_true);
  }

  const double g2 = true_params.gain * true_params.gain;
  surface.values.resize(grid_points, grid_points);
  for (int i = 0; i < grid_points; ++i)
    for (int j = 0; j < grid_points; ++j) {
      const double overlap = (cr(i) * std::conj(ct(j))).real();
      surface.values(i, j) = std::max(0.0, 2.0 * g2 * (1.0 - overlap));
    }
  return surface;
}

// Fraction of grid nodes whose loss lies within epsilon_rel of the flat
// plateau level. The plateau is measured as the median node value: the raw
// maximum is a sidelobe-alignment outlier that grows with the antenna count
// and would make the fraction shrink for surfaces that are visibly flatter.
// On a constant surface the plateau equals the maximum and the fraction is 1.
inline double flatness_fraction(const SurfaceGrid &surface, double epsilon_rel = 0.05) {
  std::vector<double> values(surface.values.data(),
                             surface.values.data() + surface.values.size());
  std::nth_element(values.begin(), values.begin() + values.size() / 2, values.end());
  const double plateau = values[values.size() / 2];
  if (plateau == 0.0)
    return static_cast<double>((surface.values.array() == 0.0).count()) /
           static_cast<double>(surface.values.size());
  const auto count =
      ((surface.values.array() - plateau).abs() <= epsilon_rel * plateau).count();
  return static_cast<double>(count) / static_cast<double>(surface.values.size());
}

struct SurfaceSummary {
  int n_r = 0, n_t = 0;
  double flatness_fraction = 0.0;
  double argmin_theta_a = 0.0, argmin_theta_d = 0.0;
  double min_value = 0.0;
  // smallest non-basin local minimum minus the global minimum; empty when
  // every local minimum sits inside the truth basin
  std::optional<double> optimality_gap;
};

inline SurfaceSummary summarize_surface(const SurfaceGrid &surface, double epsilon_rel = 0.05) {
  const int g = static_cast<int>(surface.values.rows());
  SurfaceSummary summary;
  summary.n_r = surface.config.n_r;
  summary.n_t = surface.config.n_t;
  summary.flatness_fraction = flatness_fraction(surface, epsilon_rel);

  Eigen::Index min_i = 0, min_j = 0;
  summary.min_value = surface.values.minCoeff(&min_i, &min_j);
  summary.argmin_theta_a = surface.axis[static_cast<int>(min_i)];
  summary.argmin_theta_d = surface.axis[static_cast<int>(min_j)];

  // basin: 8-connected sublevel component (10% of max) around the node
  // nearest the true angles
  const double level = 0.1 * surface.values.maxCoeff();
  auto nearest_index = [&](double target) {
    int best = 0;
    for (int k = 1; k < g; ++k)
      if (std::abs(surface.axis[k] - target) < std::abs(surface.axis[best] - target)) best = k;
    return best;
  };
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> in_basin(g, g);
  in_basin.setConstant(false);
  const int seed_i = nearest_index(surface.reference.aoa);
  const int seed_j = nearest_index(surface.reference.aod);
  if (surface.values(seed_i, seed_j) <= level) {
    std::vector<std::pair<int, int>> stack{{seed_i, seed_j}};
    in_basin(seed_i, seed_j) = true;
    while (!stack.empty()) {
      const auto [ci, cj] = stack.back();
      stack.pop_back();
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const int ni = ci + di, nj = cj + dj;
          if (ni < 0 || ni >= g || nj < 0 || nj >= g || in_basin(ni, nj)) continue;
          if (surface.values(ni, nj) <= level) {
            in_basin(ni, nj) = true;
            stack.emplace_back(ni, nj);
          }
        }
    }
  }

  double best_outside = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      if (in_basin(i, j)) continue;
      const double v = surface.values(i, j);
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1 && is_min; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int ni = i + di, nj = j + dj;
          if (ni < 0 || ni >= g || nj < 0 || nj >= g) continue;
          if (surface.values(ni, nj) <= v) is_min = false;
        }
      if (is_min) best_outside = std::min(best_outside, v);
    }
  if (std::isfinite(best_outside))
    summary.optimality_gap = best_outside - summary.min_value;
  return summary;
}

// CSV layout: one header row with the G axis values, then G rows of G losses
// (row index = arrival angle, column index = departure angle).
inline void write_surface_csv(const SurfaceGrid &surface, const std::filesystem::path &path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_surface_csv: cannot open " + path.string());
  char buf[32];
  for (std::size_t k = 0; k < surface.axis.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", surface.axis[k]);
    os << (k ? "," : "") << buf;
  }
  os << "\n";
  for (Eigen::Index i = 0; i < surface.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < surface.values.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", surface.values(i, j));
      os << (j ? "," : "") << buf;
    }
    os << "\n";
  }
}

}  // namespace genchan

#endif
