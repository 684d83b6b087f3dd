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
// Physics-based geometric channel (PBGC) model for uniform linear arrays:
// steering vectors, multipath channel synthesis and reconstruction error.

#ifndef GENCHAN_PBGC_HPP
#define GENCHAN_PBGC_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "genchan/common.hpp"

namespace genchan {

// Complex propagation matrix, shape n_r x n_t. Row index is the receive
// antenna, column index the transmit antenna.
using ChannelMatrix = Eigen::MatrixXcd;

// Uniform linear array geometry. u = 2*pi*d/lambda is the phase constant in
// radians per unit sine; wavelength and element spacing enter only through u.
// The default u = pi corresponds to half-wavelength spacing.
struct ArrayConfig {
  int n_t = 16;
  int n_r = 16;
  double u = kPi;

  ArrayConfig() = default;
  ArrayConfig(int n_t_, int n_r_, double u_ = kPi) : n_t(n_t_), n_r(n_r_), u(u_) {
    if (n_t < 1 || n_r < 1)
      throw std::invalid_argument("ArrayConfig: antenna counts must be >= 1");
    if (!(u > 0.0) || !std::isfinite(u))
      throw std::invalid_argument("ArrayConfig: phase constant u must be positive");
  }
};

// One propagation path: linear amplitude gain plus angle of arrival and
// angle of departure, both in [-pi, pi] radians.
struct PathParams {
  double gain = 0.0;
  double aoa = 0.0;
  double aod = 0.0;

  PathParams() = default;
  PathParams(double gain_, double aoa_, double aod_)
      : gain(gain_), aoa(aoa_), aod(aod_) {
    if (!std::isfinite(gain) || !std::isfinite(aoa) || !std::isfinite(aod))
      throw std::invalid_argument("PathParams: parameters must be finite");
    if (aoa < -kPi || aoa > kPi || aod < -kPi || aod > kPi)
      throw std::invalid_argument("PathParams: angles must lie in [-pi, pi]");
  }
};

namespace detail {

// Unit-norm ULA steering vector: entry k is (1/sqrt(n)) * exp(j*k*u*sin(theta)).
inline Eigen::VectorXcd steering_vector(double theta, int n, double u) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double phase_step = u * std::sin(theta);
  Eigen::VectorXcd a(n);
  for (int k = 0; k < n; ++k)
    a(k) = std::polar(scale, static_cast<double>(k) * phase_step);
  return a;
}

}  // namespace detail

inline Eigen::VectorXcd array_response_tx(double theta, const ArrayConfig &config) {
  return detail::steering_vector(theta, config.n_t, config.u);
}

inline Eigen::VectorXcd array_response_rx(double theta, const ArrayConfig &config) {
  return detail::steering_vector(theta, config.n_r, config.u);
}

// H = sum_p g_p * a_r(aoa_p) * a_t(aod_p)^H. An empty path list yields the
// zero matrix.
inline ChannelMatrix synthesize_channel(std::span<const PathParams> paths,
                                        const ArrayConfig &config) {
  ChannelMatrix h = ChannelMatrix::Zero(config.n_r, config.n_t);
  for (const PathParams &p : paths) {
    const Eigen::VectorXcd ar = array_response_rx(p.aoa, config);
    const Eigen::VectorXcd at = array_response_tx(p.aod, config);
    h.noalias() += p.gain * (ar * at.adjoint());
  }
  return h;
}

inline ChannelMatrix synthesize_channel(const std::vector<PathParams> &paths,
                                        const ArrayConfig &config) {
  return synthesize_channel(std::span<const PathParams>(paths), config);
}

// Normalized mean squared error ||H - Hhat||_F^2 / ||H||_F^2.
inline double nmse(const ChannelMatrix &reference, const ChannelMatrix &estimate) {
  if (reference.rows() != estimate.rows() || reference.cols() != estimate.cols())
    throw std::invalid_argument("nmse: shape mismatch");
  const double ref_energy = reference.squaredNorm();
  if (ref_energy == 0.0)
    throw std::domain_error("nmse: reference has zero Frobenius norm");
  return (reference - estimate).squaredNorm() / ref_energy;
}

// Flattening convention used everywhere a channel becomes a real vector:
// real plane in row-major order, then imaginary plane in row-major order.
inline Eigen::VectorXd flatten_channel(const ChannelMatrix &h) {
  const int n_r = static_cast<int>(h.rows());
  const int n_t = static_cast<int>(h.cols());
  Eigen::VectorXd v(2 * n_r * n_t);
  for (int r = 0; r < n_r; ++r)
    for (int t = 0; t < n_t; ++t) {
      v(r * n_t + t) = h(r, t).real();
      v(n_r * n_t + r * n_t + t) = h(r, t).imag();
    }
  return v;
}

inline ChannelMatrix unflatten_channel(const Eigen::VectorXd &v, int n_r, int n_t) {
  if (v.size() != 2 * n_r * n_t)
    throw std::invalid_argument("unflatten_channel: length does not match shape");
  ChannelMatrix h(n_r, n_t);
  for (int r = 0; r < n_r; ++r)
    for (int t = 0; t < n_t; ++t)
      h(r, t) = std::complex<double>(v(r * n_t + t), v(n_r * n_t + r * n_t + t));
  return h;
}

}  // namespace genchan

#endif
