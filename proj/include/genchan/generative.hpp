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
// VAE pipelines over the channel model. The direct pipeline decodes path
// parameters and synthesizes through the geometric model; the relaxed
// pipeline decodes a gain matrix and synthesizes through the dictionary.
// Training backpropagates through the synthesis step in both cases.

#ifndef GENCHAN_GENERATIVE_HPP
#define GENCHAN_GENERATIVE_HPP

#include <optional>
#include <sstream>

#include "genchan/dictionary.hpp"
#include "genchan/model_io.hpp"
#include "genchan/neural.hpp"
#include "genchan/pbgc.hpp"
#include "genchan/rng.hpp"

namespace genchan {

enum class VaeMode { Direct, Relaxed };

inline const char *to_string(VaeMode mode) {
  return mode == VaeMode::Direct ? "direct" : "relaxed";
}

inline VaeMode vae_mode_from_string(const std::string &s) {
  if (s == "direct") return VaeMode::Direct;
  if (s == "relaxed") return VaeMode::Relaxed;
  throw std::invalid_argument("unknown VAE mode '" + s + "'");
}

struct VaeConfig {
  int latent_dim = 64;
  std::vector<int> encoder_widths = {512, 256};
  std::vector<int> decoder_widths = {256, 512};
  double alpha_d = 1e-3;   // KL weight
  double alpha_s = 1e-4;   // L1 sparsity weight (relaxed mode)
  double learning_rate = 1e-3;
  int epochs = 300;
  int batch_size = 256;
  std::uint64_t seed = 1;
  VaeMode mode = VaeMode::Relaxed;
  int n_paths = 5;  // direct-mode decoder emits 3 * n_paths outputs

  void validate() const {
    if (latent_dim < 1) throw std::invalid_argument("VaeConfig: latent_dim must be >= 1");
    if (batch_size < 2) throw std::invalid_argument("VaeConfig: batch_size must be >= 2");
    if (epochs < 1) throw std::invalid_argument("VaeConfig: epochs must be >= 1");
    if (alpha_d < 0.0 || alpha_s < 0.0)
      throw std::invalid_argument("VaeConfig: loss weights must be >= 0");
    if (mode == VaeMode::Direct && n_paths < 1)
      throw std::invalid_argument("VaeConfig: direct mode needs n_paths >= 1");
    for (int w : encoder_widths)
      if (w < 1) throw std::invalid_argument("VaeConfig: encoder widths must be positive");
    for (int w : decoder_widths)
      if (w < 1) throw std::invalid_argument("VaeConfig: decoder widths must be positive");
  }
};

struct EpochStats {
  int epoch = 0;
  double total = 0.0, mse = 0.0, kl = 0.0, l1 = 0.0, nmse = 0.0;
};

struct VaeLossTerms {
  double total = 0.0, mse = 0.0, kl = 0.0, l1 = 0.0;
};

// KL divergence of N(mu, diag(exp(logvar))) against the unit Gaussian.
inline double kl_to_unit_gaussian(const Eigen::VectorXd &mu, const Eigen::VectorXd &logvar) {
  if (mu.size() != logvar.size()) throw std::invalid_argument("kl: shape mismatch");
  return 0.5 * (mu.array().square() + logvar.array().exp() - logvar.array() - 1.0).sum();
}

// Combined loss for one sample. Pass the gain matrix only in relaxed mode.
inline VaeLossTerms vae_loss(const ChannelMatrix &h, const ChannelMatrix &h_hat,
                             const Eigen::VectorXd &mu, const Eigen::VectorXd &logvar,
                             const GainMatrix *w, double alpha_d, double alpha_s) {
  if (h.rows() != h_hat.rows() || h.cols() != h_hat.cols())
    throw std::invalid_argument("vae_loss: channel shape mismatch");
  VaeLossTerms terms;
  terms.mse = (h - h_hat).squaredNorm();
  terms.kl = kl_to_unit_gaussian(mu, logvar);
  terms.l1 = w ? w->cwiseAbs().sum() : 0.0;
  terms.total = terms.mse + alpha_d * terms.kl + alpha_s * terms.l1;
  return terms;
}

// Odd, monotone, smooth squashing map onto (-pi, pi) for decoded angles.
inline double squash_angle(double raw) { return kPi * std::tanh(raw); }

class VaeModel {
 public:
  VaeConfig config;
  ArrayConfig array;
  std::optional<AngleGrid> grid;  // present in relaxed mode
  double norm_scale = 1.0;
  std::vector<EpochStats> history;

  Mlp encoder_trunk;
  DenseLayer mu_head, logvar_head;
  Mlp decoder;

  VaeModel(const VaeConfig &config_, const ArrayConfig &array_,
           std::optional<AngleGrid> grid_ = std::nullopt)
      : config(config_), array(array_), grid(std::move(grid_)) {
    config.validate();
    if ((config.mode == VaeMode::Relaxed) != grid.has_value())
      throw std::invalid_argument("VaeModel: relaxed mode needs an angle grid, direct mode none");

    Rng rng(derive_stream_seed(config.seed, 0));
    int width = in_dim();
    int block = 0;
    for (int w : config.encoder_widths) {
      const std::string prefix = "enc" + std::to_string(block++);
      encoder_trunk.add(std::make_unique<DenseLayer>(prefix + ".dense", width, w, rng));
      encoder_trunk.add(std::make_unique<BatchNormLayer>(prefix + ".bn", w));
      encoder_trunk.add(std::make_unique<LeakyReluLayer>());
      width = w;
    }
    mu_head = DenseLayer("enc.mu", width, config.latent_dim, rng);
    logvar_head = DenseLayer("enc.logvar", width, config.latent_dim, rng);

    width = config.latent_dim;
    block = 0;
    for (int w : config.decoder_widths) {
      const std::string prefix = "dec" + std::to_string(block++);
      decoder.add(std::make_unique<DenseLayer>(prefix + ".dense", width, w, rng));
      decoder.add(std::make_unique<BatchNormLayer>(prefix + ".bn", w));
      decoder.add(std::make_unique<LeakyReluLayer>());
      width = w;
    }
    decoder.add(std::make_unique<DenseLayer>("dec.out", width, out_dim(), rng));
  }

  int in_dim() const { return 2 * array.n_r * array.n_t; }
  int out_dim() const {
    return config.mode == VaeMode::Direct ? 3 * config.n_paths
                                          : grid->resolution * grid->resolution;
  }

  std::vector<Param *> collect_params() {
    std::vector<Param *> params;
    encoder_trunk.collect_params(params);
    mu_head.collect_params(params);
    logvar_head.collect_params(params);
    decoder.collect_params(params);
    return params;
  }

  std::vector<NamedTensor> collect_tensors() {
    std::vector<NamedTensor> tensors;
    encoder_trunk.collect_tensors(tensors);
    mu_head.collect_tensors(tensors);
    logvar_head.collect_tensors(tensors);
    decoder.collect_tensors(tensors);
    return tensors;
  }

  // Posterior statistics for one channel (eval-mode batch normalization).
  std::pair<Eigen::VectorXd, Eigen::VectorXd> encode(const ChannelMatrix &h) {
    if (h.rows() != array.n_r || h.cols() != array.n_t)
      throw std::invalid_argument("encode: channel shape does not match the model");
    Eigen::MatrixXd x(1, in_dim());
    x.row(0) = flatten_channel(h).transpose() / norm_scale;
    const Eigen::MatrixXd hid = encoder_trunk.forward(x, false);
    return {mu_head.forward(hid, false).row(0).transpose(),
            logvar_head.forward(hid, false).row(0).transpose()};
  }

  // Decodes a latent vector to physical path parameters (direct mode).
  // Gains are de-normalized by the stored scale; angles squash onto (-pi, pi).
  std::vector<PathParams> decode_direct(const Eigen::VectorXd &z) {
    if (config.mode != VaeMode::Direct)
      throw std::logic_error("decode_direct: model is not in direct mode");
    const Eigen::MatrixXd raw = decoder.forward(z.transpose(), false);
    std::vector<PathParams> paths;
    paths.reserve(config.n_paths);
    for (int p = 0; p < config.n_paths; ++p)
      paths.emplace_back(raw(0, 3 * p) * norm_scale, squash_angle(raw(0, 3 * p + 1)),
                         squash_angle(raw(0, 3 * p + 2)));
    return paths;
  }

  // Decodes a latent vector to a physical gain matrix (relaxed mode).
  GainMatrix decode_relaxed(const Eigen::VectorXd &z) {
    if (config.mode != VaeMode::Relaxed)
      throw std::logic_error("decode_relaxed: model is not in relaxed mode");
    const Eigen::MatrixXd raw = decoder.forward(z.transpose(), false);
    const int r = grid->resolution;
    GainMatrix w(r, r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) w(i, j) = raw(0, i * r + j) * norm_scale;
    return w;
  }
};

namespace detail {

// Per-sample cache for the direct pipeline's synthesis step.
struct DirectPathCache {
  Eigen::VectorXd gain, tanh_a, tanh_d, aoa, aod;
  std::vector<Eigen::VectorXcd> ar, at;
};

// raw decoder row -> flattened (scaled-domain) channel, caching what the
// backward pass needs.
inline Eigen::RowVectorXd direct_forward_row(const Eigen::RowVectorXd &raw, int n_paths,
                                             const ArrayConfig &array, DirectPathCache &cache) {
  cache.gain.resize(n_paths);
  cache.tanh_a.resize(n_paths);
  cache.tanh_d.resize(n_paths);
  cache.aoa.resize(n_paths);
  cache.aod.resize(n_paths);
  cache.ar.resize(n_paths);
  cache.at.resize(n_paths);
  ChannelMatrix h = ChannelMatrix::Zero(array.n_r, array.n_t);
  for (int p = 0; p < n_paths; ++p) {
    cache.gain(p) = raw(3 * p);
    cache.tanh_a(p) = std::tanh(raw(3 * p + 1));
    cache.tanh_d(p) = std::tanh(raw(3 * p + 2));
    cache.aoa(p) = kPi * cache.tanh_a(p);
    cache.aod(p) = kPi * cache.tanh_d(p);
    cache.ar[p] = array_response_rx(cache.aoa(p), array);
    cache.at[p] = array_response_tx(cache.aod(p), array);
    h.noalias() += cache.gain(p) * (cache.ar[p] * cache.at[p].adjoint());
  }
  return flatten_channel(h).transpose();
}

// Gradient of the loss with respect to the raw decoder row, given the
// gradient with respect to the flattened channel.
inline Eigen::RowVectorXd direct_backward_row(const Eigen::RowVectorXd &dh_flat, int n_paths,
                                              const ArrayConfig &array,
                                              const DirectPathCache &cache) {
  const int n_r = array.n_r, n_t = array.n_t;
  // complex gradient G = dL/dRe + j dL/dIm
  ChannelMatrix g(n_r, n_t);
  for (int r = 0; r < n_r; ++r)
    for (int t = 0; t < n_t; ++t)
      g(r, t) = std::complex<double>(dh_flat(r * n_t + t), dh_flat(n_r * n_t + r * n_t + t));

  Eigen::RowVectorXd draw(3 * n_paths);
  for (int p = 0; p < n_paths; ++p) {
    const ChannelMatrix atom = cache.ar[p] * cache.at[p].adjoint();
    const ChannelMatrix m = g.conjugate().cwiseProduct(atom);
    std::complex<double> s1(0.0, 0.0), sr(0.0, 0.0), st(0.0, 0.0);
    for (int r = 0; r < n_r; ++r) {
      const std::complex<double> row_sum = m.row(r).sum();
      s1 += row_sum;
      sr += static_cast<double>(r) * row_sum;
    }
    for (int t = 0; t < n_t; ++t) st += static_cast<double>(t) * m.col(t).sum();

    const double dgain = s1.real();
    const double daoa = -cache.gain(p) * array.u * std::cos(cache.aoa(p)) * sr.imag();
    const double daod = cache.gain(p) * array.u * std::cos(cache.aod(p)) * st.imag();
    // chain through theta = pi * tanh(raw)
    draw(3 * p) = dgain;
    draw(3 * p + 1) = daoa * kPi * (1.0 - cache.tanh_a(p) * cache.tanh_a(p));
    draw(3 * p + 2) = daod * kPi * (1.0 - cache.tanh_d(p) * cache.tanh_d(p));
  }
  return draw;
}

}  // namespace detail

inline double mean_frobenius_norm_channels(const std::vector<ChannelMatrix> &channels) {
  if (channels.empty()) return 1.0;
  double acc = 0.0;
  for (const auto &h : channels) acc += h.norm();
  return acc / static_cast<double>(channels.size());
}

namespace detail {

struct VaeBatchTerms {
  double total = 0.0, mse = 0.0, kl = 0.0, l1 = 0.0;
  double err2 = 0.0, ref2 = 0.0;  // squared-error and reference energies
};

// One forward pass (and optionally the full backward pass) over a fixed
// batch with fixed reparameterization noise. xb holds scaled flattened
// channels, one per row; eps is batch x latent. Parameter gradients
// accumulate into the model's Param slots when `backward` is set.
inline VaeBatchTerms vae_batch_pass(VaeModel &model, const Dictionary *dict,
                                    const Eigen::MatrixXd &xb, const Eigen::MatrixXd &eps,
                                    bool backward) {
  const VaeConfig &config = model.config;
  const int bsize = static_cast<int>(xb.rows());

  const Eigen::MatrixXd hid = model.encoder_trunk.forward(xb, true);
  const Eigen::MatrixXd mu = model.mu_head.forward(hid, true);
  const Eigen::MatrixXd logvar = model.logvar_head.forward(hid, true);
  const Eigen::MatrixXd sigma = (0.5 * logvar.array()).exp();
  const Eigen::MatrixXd z = mu.array() + sigma.array() * eps.array();
  const Eigen::MatrixXd decoded = model.decoder.forward(z, true);

  Eigen::MatrixXd h_hat(bsize, static_cast<int>(xb.cols()));
  std::vector<DirectPathCache> caches;
  if (config.mode == VaeMode::Relaxed) {
    h_hat.noalias() = decoded * dict->flattened();
  } else {
    caches.resize(bsize);
#pragma omp parallel for schedule(static)
    for (int b = 0; b < bsize; ++b)
      h_hat.row(b) = direct_forward_row(decoded.row(b), config.n_paths, model.array, caches[b]);
  }

  const Eigen::MatrixXd diff = h_hat - xb;
  VaeBatchTerms terms;
  terms.err2 = diff.squaredNorm();
  terms.ref2 = xb.squaredNorm();
  terms.mse = terms.err2 / bsize;
  terms.kl =
      0.5 * (mu.array().square() + logvar.array().exp() - logvar.array() - 1.0).sum() / bsize;
  terms.l1 = config.mode == VaeMode::Relaxed ? decoded.cwiseAbs().sum() / bsize : 0.0;
  terms.total = terms.mse + config.alpha_d * terms.kl + config.alpha_s * terms.l1;

  if (backward) {
    const Eigen::MatrixXd dh_hat = (2.0 / bsize) * diff;
    Eigen::MatrixXd ddecoded(bsize, model.out_dim());
    if (config.mode == VaeMode::Relaxed) {
      ddecoded.noalias() = dh_hat * dict->flattened().transpose();
      ddecoded.array() += (config.alpha_s / bsize) * decoded.array().sign();
    } else {
#pragma omp parallel for schedule(static)
      for (int b = 0; b < bsize; ++b)
        ddecoded.row(b) = direct_backward_row(dh_hat.row(b), config.n_paths, model.array,
                                              caches[b]);
    }
    const Eigen::MatrixXd dz = model.decoder.backward(ddecoded);
    const Eigen::MatrixXd dmu = dz + (config.alpha_d / bsize) * mu;
    const Eigen::MatrixXd dlogvar =
        (dz.array() * eps.array() * 0.5 * sigma.array()) +
        (config.alpha_d / bsize) * 0.5 * (logvar.array().exp() - 1.0);
    const Eigen::MatrixXd dhid =
        model.mu_head.backward(dmu) + model.logvar_head.backward(dlogvar);
    model.encoder_trunk.backward(dhid);
  }
  return terms;
}

}  // namespace detail

// Continues mini-batch training of an existing model on a dataset. The
// dictionary must be given exactly in relaxed mode; in relaxed mode its
// array config must match the model's. Appends to the model's history.
inline void train_in_place(VaeModel &model, const std::vector<ChannelMatrix> &dataset,
                           const Dictionary *dict) {
  const VaeConfig &config = model.config;
  const ArrayConfig &array = model.array;
  config.validate();
  if (dataset.size() < 2) throw std::invalid_argument("train: need at least 2 samples");
  if ((config.mode == VaeMode::Relaxed) != (dict != nullptr))
    throw std::invalid_argument("train: dictionary must be given exactly in relaxed mode");
  for (const auto &h : dataset)
    if (h.rows() != array.n_r || h.cols() != array.n_t)
      throw std::invalid_argument("train: dataset channels do not match the array config");
  if (dict &&
      (dict->config().n_r != array.n_r || dict->config().n_t != array.n_t ||
       dict->config().u != array.u || dict->resolution() != model.grid->resolution))
    throw std::invalid_argument("train: dictionary does not match the model");

  // normalize by the mean Frobenius norm so loss magnitudes are O(1)
  double scale = mean_frobenius_norm_channels(dataset);
  if (!(scale > 0.0)) scale = 1.0;
  model.norm_scale = scale;

  const int n = static_cast<int>(dataset.size());
  const int in_dim = model.in_dim();
  Eigen::MatrixXd data(n, in_dim);
  for (int i = 0; i < n; ++i)
    data.row(i) = flatten_channel(dataset[i]).transpose() / scale;

  std::vector<Param *> params = model.collect_params();
  Adam optimizer(config.learning_rate);
  Rng rng(derive_stream_seed(config.seed, 1));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  const int latent = config.latent_dim;
  model.history.reserve(config.epochs);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double mse_sum = 0.0, kl_sum = 0.0, l1_sum = 0.0, err2_sum = 0.0, ref2_sum = 0.0;
    int seen = 0;
    for (int start = 0, batch_index = 0; start < n; start += config.batch_size, ++batch_index) {
      const int bsize = std::min(config.batch_size, n - start);
      if (bsize < 2) break;  // batchnorm needs at least two samples

      Eigen::MatrixXd xb(bsize, in_dim);
      for (int b = 0; b < bsize; ++b) xb.row(b) = data.row(order[start + b]);
      Eigen::MatrixXd eps(bsize, latent);
      for (int b = 0; b < bsize; ++b)
        for (int k = 0; k < latent; ++k) eps(b, k) = rng.normal();

      zero_grads(params);
      const detail::VaeBatchTerms terms = detail::vae_batch_pass(model, dict, xb, eps, true);
      if (!std::isfinite(terms.total))
        throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                                 ", batch " + std::to_string(batch_index));
      optimizer.step(params);

      mse_sum += terms.mse * bsize;
      kl_sum += terms.kl * bsize;
      l1_sum += terms.l1 * bsize;
      err2_sum += terms.err2;
      ref2_sum += terms.ref2;
      seen += bsize;
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.mse = mse_sum / seen;
    stats.kl = kl_sum / seen;
    stats.l1 = l1_sum / seen;
    stats.total = stats.mse + config.alpha_d * stats.kl + config.alpha_s * stats.l1;
    stats.nmse = ref2_sum > 0.0 ? err2_sum / ref2_sum : 0.0;
    model.history.push_back(stats);
  }
}

// Builds a fresh model and trains it.
inline VaeModel train(const std::vector<ChannelMatrix> &dataset, const ArrayConfig &array,
                      const Dictionary *dict, const VaeConfig &config) {
  std::optional<AngleGrid> grid;
  if (dict) grid = dict->grid();
  VaeModel model(config, array, grid);
  train_in_place(model, dataset, dict);
  return model;
}

struct GeneratedSamples {
  std::vector<ChannelMatrix> channels;
  std::vector<GainMatrix> gains;  // one per sample in relaxed mode, empty otherwise
};

// Draws latents from the unit Gaussian, decodes in eval mode and synthesizes
// physical-scale channels. Deterministic for a fixed seed.
inline GeneratedSamples generate(VaeModel &model, const Dictionary *dict, int count,
                                 std::uint64_t seed) {
  if (count < 0) throw std::invalid_argument("generate: count must be >= 0");
  if ((model.config.mode == VaeMode::Relaxed) != (dict != nullptr))
    throw std::invalid_argument("generate: dictionary must be given exactly in relaxed mode");
  GeneratedSamples out;
  if (count == 0) return out;
  if (dict && dict->resolution() != model.grid->resolution)
    throw std::invalid_argument("generate: dictionary resolution does not match the model");

  Rng rng(seed);
  Eigen::MatrixXd z(count, model.config.latent_dim);
  for (int i = 0; i < count; ++i)
    for (int k = 0; k < model.config.latent_dim; ++k) z(i, k) = rng.normal();

  const Eigen::MatrixXd decoded = model.decoder.forward(z, false);
  const double scale = model.norm_scale;
  out.channels.reserve(count);
  if (model.config.mode == VaeMode::Relaxed) {
    const int r = model.grid->resolution;
    const Eigen::MatrixXd h_flat = decoded * dict->flattened();
    out.gains.reserve(count);
    for (int i = 0; i < count; ++i) {
      out.channels.push_back(
          unflatten_channel(h_flat.row(i).transpose() * scale, model.array.n_r, model.array.n_t));
      GainMatrix w(r, r);
      for (int a = 0; a < r; ++a)
        for (int d = 0; d < r; ++d) w(a, d) = decoded(i, a * r + d) * scale;
      out.gains.push_back(std::move(w));
    }
  } else {
    for (int i = 0; i < count; ++i) {
      std::vector<PathParams> paths;
      paths.reserve(model.config.n_paths);
      for (int p = 0; p < model.config.n_paths; ++p)
        paths.emplace_back(decoded(i, 3 * p) * scale, squash_angle(decoded(i, 3 * p + 1)),
                           squash_angle(decoded(i, 3 * p + 2)));
      out.channels.push_back(synthesize_channel(paths, model.array));
    }
  }
  return out;
}

// --- checkpointing ---------------------------------------------------------

inline std::string join_widths(const std::vector<int> &widths) {
  std::ostringstream os;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (i) os << ",";
    os << widths[i];
  }
  return os.str();
}

inline std::vector<int> parse_widths(const std::string &text) {
  std::vector<int> widths;
  if (text.empty()) return widths;
  std::istringstream is(text);
  std::string tok;
  while (std::getline(is, tok, ',')) widths.push_back(std::stoi(tok));
  return widths;
}

inline void save_vae(VaeModel &model, const std::filesystem::path &path) {
  CheckpointData data;
  data.meta["model"] = "vae";
  data.meta["mode"] = to_string(model.config.mode);
  data.set_int("latent_dim", model.config.latent_dim);
  data.meta["encoder_widths"] = join_widths(model.config.encoder_widths);
  data.meta["decoder_widths"] = join_widths(model.config.decoder_widths);
  data.set_double("alpha_d", model.config.alpha_d);
  data.set_double("alpha_s", model.config.alpha_s);
  data.set_double("learning_rate", model.config.learning_rate);
  data.set_int("epochs", model.config.epochs);
  data.set_int("batch_size", model.config.batch_size);
  data.meta["seed"] = std::to_string(model.config.seed);
  data.set_int("n_paths", model.config.n_paths);
  data.set_int("n_r", model.array.n_r);
  data.set_int("n_t", model.array.n_t);
  data.set_double("u", model.array.u);
  data.set_double("norm_scale", model.norm_scale);
  if (model.grid) {
    data.set_double("grid_theta_min", model.grid->theta_min);
    data.set_double("grid_theta_max", model.grid->theta_max);
    data.set_int("grid_resolution", model.grid->resolution);
  }
  for (const NamedTensor &t : model.collect_tensors()) data.tensors.emplace_back(t.name, *t.data);
  save_checkpoint(data, path);
}

inline VaeModel load_vae(const std::filesystem::path &path) {
  const CheckpointData data = load_checkpoint(path);
  if (data.get("model") != "vae")
    throw ShapeError("load_vae: checkpoint does not hold a VAE model");
  VaeConfig config;
  config.mode = vae_mode_from_string(data.get("mode"));
  config.latent_dim = static_cast<int>(data.get_int("latent_dim"));
  config.encoder_widths = parse_widths(data.get("encoder_widths"));
  config.decoder_widths = parse_widths(data.get("decoder_widths"));
  config.alpha_d = data.get_double("alpha_d");
  config.alpha_s = data.get_double("alpha_s");
  config.learning_rate = data.get_double("learning_rate");
  config.epochs = static_cast<int>(data.get_int("epochs"));
  config.batch_size = static_cast<int>(data.get_int("batch_size"));
  config.seed = std::stoull(data.get("seed"));
  config.n_paths = static_cast<int>(data.get_int("n_paths"));
  const ArrayConfig array(static_cast<int>(data.get_int("n_t")),
                          static_cast<int>(data.get_int("n_r")), data.get_double("u"));
  std::optional<AngleGrid> grid;
  if (config.mode == VaeMode::Relaxed)
    grid = AngleGrid(data.get_double("grid_theta_min"), data.get_double("grid_theta_max"),
                     static_cast<int>(data.get_int("grid_resolution")));
  VaeModel model(config, array, grid);
  model.norm_scale = data.get_double("norm_scale");

  std::vector<NamedTensor> tensors = model.collect_tensors();
  if (tensors.size() != data.tensors.size())
    throw ShapeError("load_vae: tensor count does not match the model layout");
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto &[name, value] = data.tensors[i];
    if (name != tensors[i].name)
      throw ShapeError("load_vae: unexpected tensor '" + name + "', wanted '" +
                       tensors[i].name + "'");
    if (value.rows() != tensors[i].data->rows() || value.cols() != tensors[i].data->cols())
      throw ShapeError("load_vae: shape mismatch for tensor '" + name + "'");
    *tensors[i].data = value;
  }
  return model;
}

// Per-epoch metrics CSV: epoch, total, mse, kl, l1, nmse.
inline void write_history_csv(const std::vector<EpochStats> &history,
                              const std::filesystem::path &path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_history_csv: cannot open " + path.string());
  os << "epoch,total,mse,kl,l1,nmse\n";
  char buf[160];
  for (const EpochStats &row : history) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", row.epoch, row.total,
                  row.mse, row.kl, row.l1, row.nmse);
    os << buf;
  }
}

}  // namespace genchan

#endif
