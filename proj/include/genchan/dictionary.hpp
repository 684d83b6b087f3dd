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
// Discretized angle-pair dictionary: precomputed steering-vector outer
// products, relaxed channel synthesis from a gain matrix, and extraction of
// path parameters from learned gain matrices.

#ifndef GENCHAN_DICTIONARY_HPP
#define GENCHAN_DICTIONARY_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <vector>

#include "genchan/pbgc.hpp"

namespace genchan {

// Real R x R weight matrix over the dictionary; entry (i, j) scales the atom
// for arrival index i and departure index j.
using GainMatrix = Eigen::MatrixXd;

// Uniform partition of [theta_min, theta_max] into `resolution` intervals of
// width delta. Grid angles are placed at interval midpoints.
struct AngleGrid {
  double theta_min = -kPi / 2.0;
  double theta_max = kPi / 2.0;
  int resolution = 64;
  double delta = kPi / 64.0;

  AngleGrid() = default;
  AngleGrid(double theta_min_, double theta_max_, int resolution_)
      : theta_min(theta_min_), theta_max(theta_max_), resolution(resolution_) {
    if (!(theta_min < theta_max))
      throw std::invalid_argument("AngleGrid: theta_min must be < theta_max");
    if (resolution < 2)
      throw std::invalid_argument("AngleGrid: resolution must be >= 2");
    delta = (theta_max - theta_min) / resolution;
  }
};

// Midpoint of grid interval `index`.
inline double grid_angle(int index, const AngleGrid &grid) {
  if (index < 0 || index >= grid.resolution)
    throw std::out_of_range("grid_angle: index out of range");
  return grid.theta_min + (index + 0.5) * grid.delta;
}

inline constexpr std::size_t kDefaultDictionaryBudget = std::size_t(1) << 30;  // 1 GiB

// R^2 precomputed atoms D(i,j) = a_r(theta_i) * a_t(theta_j)^H, each with unit
// Frobenius norm. Also keeps a flattened real view (one row per atom, using
// the channel flattening convention) so relaxed synthesis is a single GEMV.
// Immutable after construction and safe to share across threads.
class Dictionary {
 public:
  Dictionary(const AngleGrid &grid, const ArrayConfig &config,
             std::size_t memory_budget_bytes = kDefaultDictionaryBudget)
      : grid_(grid), config_(config) {
    const std::size_t r = static_cast<std::size_t>(grid.resolution);
    const std::size_t nm = static_cast<std::size_t>(config.n_r) * config.n_t;
    // complex atoms plus the flattened real copy
    const std::size_t bytes = r * r * nm * (sizeof(std::complex<double>) + 2 * sizeof(double));
    if (bytes > memory_budget_bytes)
      throw BudgetError("Dictionary: " + std::to_string(bytes) +
                        " bytes exceed budget of " + std::to_string(memory_budget_bytes));

    const int R = grid.resolution;
    std::vector<Eigen::VectorXcd> rx(R), tx(R);
    for (int i = 0; i < R; ++i) {
      rx[i] = array_response_rx(grid_angle(i, grid), config);
      tx[i] = array_response_tx(grid_angle(i, grid), config);
    }
    atoms_.resize(static_cast<std::size_t>(R) * R);
    flat_.resize(static_cast<Eigen::Index>(R) * R, static_cast<Eigen::Index>(2 * nm));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < R; ++i) {
      for (int j = 0; j < R; ++j) {
        const std::size_t idx = static_cast<std::size_t>(i) * R + j;
        atoms_[idx] = rx[i] * tx[j].adjoint();
        flat_.row(static_cast<Eigen::Index>(idx)) = flatten_channel(atoms_[idx]).transpose();
      }
    }
  }

  const ChannelMatrix &atom(int i, int j) const {
    if (i < 0 || i >= grid_.resolution || j < 0 || j >= grid_.resolution)
      throw std::out_of_range("Dictionary::atom: index out of range");
    return atoms_[static_cast<std::size_t>(i) * grid_.resolution + j];
  }

  // Row (i*R + j) is the flattened atom (i, j); shape R^2 x 2*n_r*n_t.
  const Eigen::MatrixXd &flattened() const { return flat_; }
  const AngleGrid &grid() const { return grid_; }
  const ArrayConfig &config() const { return config_; }
  int resolution() const { return grid_.resolution; }

 private:
  AngleGrid grid_;
  ArrayConfig config_;
  std::vector<ChannelMatrix> atoms_;
  Eigen::MatrixXd flat_;
};

inline Dictionary build_dictionary(const AngleGrid &grid, const ArrayConfig &config,
                                   std::size_t memory_budget_bytes = kDefaultDictionaryBudget) {
  return Dictionary(grid, config, memory_budget_bytes);
}

// H = sum_ij W(i,j) * D(i,j).
inline ChannelMatrix relaxed_synthesize(const GainMatrix &w, const Dictionary &dict) {
  const int R = dict.resolution();
  if (w.rows() != R || w.cols() != R)
    throw std::invalid_argument("relaxed_synthesize: gain matrix shape does not match dictionary");
  Eigen::VectorXd w_flat(static_cast<Eigen::Index>(R) * R);
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < R; ++j)
      w_flat(static_cast<Eigen::Index>(i) * R + j) = w(i, j);
  const Eigen::VectorXd h_flat = dict.flattened().transpose() * w_flat;
  return unflatten_channel(h_flat, dict.config().n_r, dict.config().n_t);
}

namespace detail {

// Nearest-midpoint cell index for an angle; ties at a cell boundary go to
// the lower index.
inline int nearest_cell(double theta, const AngleGrid &grid) {
  const double x = (theta - grid.theta_min) / grid.delta;
  int best = -1;
  double best_dist = 0.0;
  const int lo = std::max(0, static_cast<int>(std::floor(x)) - 1);
  const int hi = std::min(grid.resolution - 1, static_cast<int>(std::floor(x)) + 1);
  for (int i = lo; i <= hi; ++i) {
    const double d = std::abs(x - (i + 0.5));
    if (best < 0 || d < best_dist) {
      best = i;
      best_dist = d;
    }
  }
  return best;
}

}  // namespace detail

// Accumulates each path's gain into the cell whose midpoint pair is nearest
// to (aoa, aod). Inverts relaxed synthesis for grid-aligned paths.
inline GainMatrix project_paths(std::span<const PathParams> paths, const AngleGrid &grid) {
  GainMatrix w = GainMatrix::Zero(grid.resolution, grid.resolution);
  for (const PathParams &p : paths) {
    if (p.aoa < grid.theta_min || p.aoa >= grid.theta_max ||
        p.aod < grid.theta_min || p.aod >= grid.theta_max)
      throw std::invalid_argument("project_paths: path angle outside grid range");
    w(detail::nearest_cell(p.aoa, grid), detail::nearest_cell(p.aod, grid)) += p.gain;
  }
  return w;
}

inline GainMatrix project_paths(const std::vector<PathParams> &paths, const AngleGrid &grid) {
  return project_paths(std::span<const PathParams>(paths), grid);
}

// Returns one path per cell that is a strict local maximum of |W| over its
// 8-neighborhood and exceeds rel_threshold * max|W|, sorted by descending
// |gain|. An all-zero matrix yields an empty list.
inline std::vector<PathParams> extract_paths(const GainMatrix &w, const AngleGrid &grid,
                                             double rel_threshold = 0.1) {
  const int R = grid.resolution;
  if (w.rows() != R || w.cols() != R)
    throw std::invalid_argument("extract_paths: gain matrix shape does not match grid");
  if (!w.allFinite())
    throw std::invalid_argument("extract_paths: gain matrix has non-finite entries");
  if (!(rel_threshold > 0.0) || rel_threshold > 1.0)
    throw std::invalid_argument("extract_paths: rel_threshold must be in (0, 1]");

  const double peak = w.cwiseAbs().maxCoeff();
  if (peak == 0.0) return {};
  const double floor = rel_threshold * peak;

  std::vector<PathParams> out;
  for (int i = 0; i < R; ++i) {
    for (int j = 0; j < R; ++j) {
      const double v = std::abs(w(i, j));
      if (v < floor) continue;
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di)
        for (int dj = -1; dj <= 1 && is_max; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int ni = i + di, nj = j + dj;
          if (ni < 0 || ni >= R || nj < 0 || nj >= R) continue;
          if (std::abs(w(ni, nj)) >= v) is_max = false;
        }
      if (is_max) out.emplace_back(w(i, j), grid_angle(i, grid), grid_angle(j, grid));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const PathParams &a, const PathParams &b) {
    return std::abs(a.gain) > std::abs(b.gain);
  });
  return out;
}

// --- optional dictionary cache file ------------------------------------
//
// Layout (little endian):
//   magic "GDCT", version u16
//   R u16, n_r u16, n_t u16
//   u f64, theta_min f64, theta_max f64
//   R^2 atom payloads, each [real plane row-major][imag plane row-major] f64
// Atoms appear in row-major (i, j) order, matching Dictionary::flattened().

namespace detail {

inline void write_exact(std::ofstream &os, const void *p, std::size_t n) {
  os.write(static_cast<const char *>(p), static_cast<std::streamsize>(n));
}

inline void read_exact(std::ifstream &is, void *p, std::size_t n, const char *what) {
  is.read(static_cast<char *>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    throw TruncatedError(std::string("truncated payload while reading ") + what);
}

}  // namespace detail

inline constexpr std::uint16_t kDictionaryFormatVersion = 1;

inline void save_dictionary(const Dictionary &dict, const std::filesystem::path &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_dictionary: cannot open " + path.string());
  os.write("GDCT", 4);
  const std::uint16_t version = kDictionaryFormatVersion;
  const std::uint16_t r = static_cast<std::uint16_t>(dict.resolution());
  const std::uint16_t n_r = static_cast<std::uint16_t>(dict.config().n_r);
  const std::uint16_t n_t = static_cast<std::uint16_t>(dict.config().n_t);
  detail::write_exact(os, &version, 2);
  detail::write_exact(os, &r, 2);
  detail::write_exact(os, &n_r, 2);
  detail::write_exact(os, &n_t, 2);
  const double header_f64[3] = {dict.config().u, dict.grid().theta_min, dict.grid().theta_max};
  detail::write_exact(os, header_f64, sizeof(header_f64));
  for (int i = 0; i < dict.resolution(); ++i)
    for (int j = 0; j < dict.resolution(); ++j) {
      const Eigen::VectorXd flat = flatten_channel(dict.atom(i, j));
      detail::write_exact(os, flat.data(), sizeof(double) * flat.size());
    }
  if (!os) throw std::runtime_error("save_dictionary: write failed for " + path.string());
}

inline Dictionary load_dictionary(const std::filesystem::path &path,
                                  std::size_t memory_budget_bytes = kDefaultDictionaryBudget) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_dictionary: cannot open " + path.string());
  char magic[4];
  detail::read_exact(is, magic, 4, "magic");
  if (std::string_view(magic, 4) != "GDCT")
    throw MagicError("load_dictionary: bad magic in " + path.string());
  std::uint16_t version, r, n_r, n_t;
  detail::read_exact(is, &version, 2, "version");
  if (version != kDictionaryFormatVersion)
    throw VersionError("load_dictionary: unsupported version " + std::to_string(version));
  detail::read_exact(is, &r, 2, "resolution");
  detail::read_exact(is, &n_r, 2, "n_r");
  detail::read_exact(is, &n_t, 2, "n_t");
  double header_f64[3];
  detail::read_exact(is, header_f64, sizeof(header_f64), "grid header");
  const AngleGrid grid(header_f64[1], header_f64[2], r);
  const ArrayConfig config(n_t, n_r, header_f64[0]);

  Dictionary dict(grid, config, memory_budget_bytes);
  // Verify the payload matches what the header key rebuilds.
  const std::size_t nm = static_cast<std::size_t>(n_r) * n_t;
  std::vector<double> buf(2 * nm);
  for (int i = 0; i < grid.resolution; ++i)
    for (int j = 0; j < grid.resolution; ++j) {
      detail::read_exact(is, buf.data(), sizeof(double) * buf.size(), "atom payload");
      const Eigen::Map<const Eigen::VectorXd> flat(buf.data(), static_cast<Eigen::Index>(buf.size()));
      if ((flat.transpose() - dict.flattened().row(static_cast<Eigen::Index>(i) * r + j)).cwiseAbs().maxCoeff() != 0.0)
        throw ShapeError("load_dictionary: atom payload does not match header key");
    }
  return dict;
}

// --- gain-matrix sample file -------------------------------------------
//
// GMTX layout (little endian): magic "GMTX", version u16, n_samples u32,
// resolution u16, then per-sample R x R payloads as f64 row-major.

inline constexpr std::uint16_t kGainFormatVersion = 1;

inline void save_gain_matrices(const std::vector<GainMatrix> &gains,
                               const std::filesystem::path &path) {
  int r = 0;
  if (!gains.empty()) {
    r = static_cast<int>(gains.front().rows());
    for (const auto &w : gains)
      if (w.rows() != r || w.cols() != r)
        throw std::invalid_argument("save_gain_matrices: matrices do not share one resolution");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_gain_matrices: cannot open " + path.string());
  os.write("GMTX", 4);
  const std::uint16_t version = kGainFormatVersion;
  const std::uint32_t n = static_cast<std::uint32_t>(gains.size());
  const std::uint16_t r16 = static_cast<std::uint16_t>(r);
  detail::write_exact(os, &version, 2);
  detail::write_exact(os, &n, 4);
  detail::write_exact(os, &r16, 2);
  for (const auto &w : gains)
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        const double v = w(i, j);
        detail::write_exact(os, &v, 8);
      }
  if (!os) throw std::runtime_error("save_gain_matrices: write failed for " + path.string());
}

inline std::vector<GainMatrix> load_gain_matrices(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_gain_matrices: cannot open " + path.string());
  char magic[4];
  detail::read_exact(is, magic, 4, "magic");
  if (std::string_view(magic, 4) != "GMTX")
    throw MagicError("load_gain_matrices: bad magic in " + path.string());
  std::uint16_t version, r;
  std::uint32_t n;
  detail::read_exact(is, &version, 2, "version");
  if (version != kGainFormatVersion)
    throw VersionError("load_gain_matrices: unsupported version " + std::to_string(version));
  detail::read_exact(is, &n, 4, "sample count");
  detail::read_exact(is, &r, 2, "resolution");
  if (n > 0 && r < 2) throw ShapeError("load_gain_matrices: resolution below 2");
  std::vector<GainMatrix> gains;
  gains.reserve(n);
  for (std::uint32_t s = 0; s < n; ++s) {
    GainMatrix w(r, r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        double v;
        detail::read_exact(is, &v, 8, "gain payload");
        w(i, j) = v;
      }
    gains.push_back(std::move(w));
  }
  if (is.peek() != std::ifstream::traits_type::eof())
    throw ShapeError("load_gain_matrices: unexpected trailing bytes");
  return gains;
}

}  // namespace genchan

#endif
