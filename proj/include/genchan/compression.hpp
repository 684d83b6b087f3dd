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
// Downstream utility evaluation: bottleneck compression autoencoders over
// channel datasets and the train/test cross-evaluation NMSE matrix.

#ifndef GENCHAN_COMPRESSION_HPP
#define GENCHAN_COMPRESSION_HPP

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "genchan/datasets.hpp"
#include "genchan/neural.hpp"

namespace genchan {

struct CompressorConfig {
  int bottleneck_dim = 32;
  std::vector<int> widths = {256};
  int epochs = 300;
  int batch_size = 256;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;

  void validate(int in_dim) const {
    if (bottleneck_dim < 1 || bottleneck_dim >= in_dim)
      throw std::invalid_argument("CompressorConfig: bottleneck must be in [1, in_dim)");
    if (batch_size < 2) throw std::invalid_argument("CompressorConfig: batch_size must be >= 2");
    if (epochs < 1) throw std::invalid_argument("CompressorConfig: epochs must be >= 1");
    for (int w : widths)
      if (w < 1) throw std::invalid_argument("CompressorConfig: widths must be positive");
  }
};

struct CompressorEpoch {
  int epoch = 0;
  double mse = 0.0, nmse = 0.0;
};

struct CompressorModel {
  CompressorConfig config;
  int n_r = 0, n_t = 0;
  double norm_scale = 1.0;
  Mlp net;
  std::vector<CompressorEpoch> history;

  int in_dim() const { return 2 * n_r * n_t; }
};

// Dense autoencoder trained on squared reconstruction error:
// flatten -> hidden widths -> bottleneck -> mirrored widths -> flatten.
inline CompressorModel train_compressor(const ChannelDataset &dataset,
                                        const CompressorConfig &config) {
  if (dataset.channels.size() < 2)
    throw std::invalid_argument("train_compressor: need at least 2 samples");
  const int n_r = static_cast<int>(dataset.channels.front().rows());
  const int n_t = static_cast<int>(dataset.channels.front().cols());
  for (const auto &h : dataset.channels)
    if (h.rows() != n_r || h.cols() != n_t)
      throw std::invalid_argument("train_compressor: channels do not share one shape");

  CompressorModel model;
  model.config = config;
  model.n_r = n_r;
  model.n_t = n_t;
  const int in_dim = model.in_dim();
  config.validate(in_dim);

  Rng init_rng(derive_stream_seed(config.seed, 0));
  int width = in_dim;
  int block = 0;
  for (int w : config.widths) {
    const std::string prefix = "enc" + std::to_string(block++);
    model.net.add(std::make_unique<DenseLayer>(prefix + ".dense", width, w, init_rng));
    model.net.add(std::make_unique<BatchNormLayer>(prefix + ".bn", w));
    model.net.add(std::make_unique<LeakyReluLayer>());
    width = w;
  }
  model.net.add(std::make_unique<DenseLayer>("bottleneck", width, config.bottleneck_dim, init_rng));
  width = config.bottleneck_dim;
  block = 0;
  for (auto it = config.widths.rbegin(); it != config.widths.rend(); ++it) {
    const std::string prefix = "dec" + std::to_string(block++);
    model.net.add(std::make_unique<DenseLayer>(prefix + ".dense", width, *it, init_rng));
    model.net.add(std::make_unique<BatchNormLayer>(prefix + ".bn", *it));
    model.net.add(std::make_unique<LeakyReluLayer>());
    width = *it;
  }
  model.net.add(std::make_unique<DenseLayer>("out", width, in_dim, init_rng));

  double scale = mean_frobenius_norm(dataset.channels);
  if (!(scale > 0.0)) scale = 1.0;
  model.norm_scale = scale;

  const int n = static_cast<int>(dataset.channels.size());
  Eigen::MatrixXd data(n, in_dim);
  for (int i = 0; i < n; ++i)
    data.row(i) = flatten_channel(dataset.channels[i]).transpose() / scale;

  std::vector<Param *> params;
  model.net.collect_params(params);
  Adam optimizer(config.learning_rate);
  Rng rng(derive_stream_seed(config.seed, 1));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  model.history.reserve(config.epochs);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double err2_sum = 0.0, ref2_sum = 0.0;
    int seen = 0;
    for (int start = 0, batch_index = 0; start < n; start += config.batch_size, ++batch_index) {
      const int bsize = std::min(config.batch_size, n - start);
      if (bsize < 2) break;
      Eigen::MatrixXd xb(bsize, in_dim);
      for (int b = 0; b < bsize; ++b) xb.row(b) = data.row(order[start + b]);

      zero_grads(params);
      const Eigen::MatrixXd y = model.net.forward(xb, true);
      const Eigen::MatrixXd diff = y - xb;
      const double mse_b = diff.squaredNorm() / bsize;
      if (!std::isfinite(mse_b))
        throw std::runtime_error("train_compressor: non-finite loss at epoch " +
                                 std::to_string(epoch) + ", batch " +
                                 std::to_string(batch_index));
      model.net.backward((2.0 / bsize) * diff);
      optimizer.step(params);

      err2_sum += diff.squaredNorm();
      ref2_sum += xb.squaredNorm();
      seen += bsize;
    }
    CompressorEpoch row;
    row.epoch = epoch;
    row.mse = err2_sum / seen;
    row.nmse = ref2_sum > 0.0 ? err2_sum / ref2_sum : 0.0;
    model.history.push_back(row);
  }
  return model;
}

// Mean NMSE (ratio of summed energies) of the reconstruction over a test
// set, in eval mode. Scale-invariant, so the model's stored normalization
// cancels out.
inline double compressor_nmse(CompressorModel &model, const std::vector<ChannelMatrix> &channels) {
  if (channels.empty()) throw std::invalid_argument("compressor_nmse: empty test set");
  const int in_dim = model.in_dim();
  Eigen::MatrixXd x(static_cast<int>(channels.size()), in_dim);
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i].rows() != model.n_r || channels[i].cols() != model.n_t)
      throw std::invalid_argument("compressor_nmse: channel shape does not match the model");
    x.row(static_cast<Eigen::Index>(i)) =
        flatten_channel(channels[i]).transpose() / model.norm_scale;
  }
  const Eigen::MatrixXd y = model.net.forward(x, false);
  const double ref2 = x.squaredNorm();
  if (ref2 == 0.0) throw std::domain_error("compressor_nmse: zero-energy test set");
  return (y - x).squaredNorm() / ref2;
}

struct NamedDataset {
  std::string name;
  const ChannelDataset *dataset = nullptr;
};

struct CrossEvalResult {
  std::vector<std::string> train_labels, test_labels;
  Eigen::MatrixXd nmse;  // rows = train sets, cols = test sets
};

// Trains one compressor per train set and evaluates it on every test set.
// Training jobs run in parallel, bounded by `jobs`; results are independent
// of the job count.
inline CrossEvalResult cross_evaluate(const std::vector<NamedDataset> &train_sets,
                                      const std::vector<NamedDataset> &test_sets,
                                      const CompressorConfig &config, int jobs = 1) {
  if (train_sets.empty() || test_sets.empty())
    throw std::invalid_argument("cross_evaluate: needs train and test sets");
  int n_r = -1, n_t = -1;
  auto check_shape = [&](const ChannelDataset &ds) {
    if (ds.channels.empty()) throw std::invalid_argument("cross_evaluate: empty dataset");
    if (n_r < 0) {
      n_r = static_cast<int>(ds.channels.front().rows());
      n_t = static_cast<int>(ds.channels.front().cols());
    }
    for (const auto &h : ds.channels)
      if (h.rows() != n_r || h.cols() != n_t)
        throw std::invalid_argument("cross_evaluate: datasets do not share one channel shape");
  };
  for (const auto &s : train_sets) check_shape(*s.dataset);
  for (const auto &s : test_sets) check_shape(*s.dataset);

  CrossEvalResult result;
  for (const auto &s : train_sets) result.train_labels.push_back(s.name);
  for (const auto &s : test_sets) result.test_labels.push_back(s.name);
  result.nmse.resize(static_cast<Eigen::Index>(train_sets.size()),
                     static_cast<Eigen::Index>(test_sets.size()));

  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t row = next.fetch_add(1);
      if (row >= train_sets.size()) return;
      try {
        CompressorModel model = train_compressor(*train_sets[row].dataset, config);
        for (std::size_t col = 0; col < test_sets.size(); ++col)
          result.nmse(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
              compressor_nmse(model, test_sets[col].dataset->channels);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  const int thread_count = std::max(1, std::min<int>(jobs, static_cast<int>(train_sets.size())));
  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

// CSV matrix with train sets as rows and test sets as columns.
inline void write_cross_eval_csv(const CrossEvalResult &result,
                                 const std::filesystem::path &path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_cross_eval_csv: cannot open " + path.string());
  os << "train\\test";
  for (const auto &label : result.test_labels) os << "," << label;
  os << "\n";
  char buf[32];
  for (Eigen::Index i = 0; i < result.nmse.rows(); ++i) {
    os << result.train_labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < result.nmse.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", result.nmse(i, j));
      os << "," << buf;
    }
    os << "\n";
  }
}

}  // namespace genchan

#endif
