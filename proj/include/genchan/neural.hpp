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
// Minimal dense neural-network stack in 64-bit floats: dense layers, batch
// normalization, leaky rectifier, reparameterized Gaussian sampling and the
// Adam optimizer. Reverse mode works through an explicit per-layer tape:
// forward() caches what backward() needs, backward() returns the input
// gradient and accumulates parameter gradients.

#ifndef GENCHAN_NEURAL_HPP
#define GENCHAN_NEURAL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "genchan/common.hpp"
#include "genchan/rng.hpp"

namespace genchan {

// Trainable tensor. Biases and batchnorm vectors are stored as 1 x n.
struct Param {
  std::string name;
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad;

  Param() = default;
  Param(std::string name_, Eigen::MatrixXd value_)
      : name(std::move(name_)),
        value(std::move(value_)),
        grad(Eigen::MatrixXd::Zero(value.rows(), value.cols())) {}
};

// Named view of any persistent tensor (parameters and buffers) for
// checkpointing.
struct NamedTensor {
  std::string name;
  Eigen::MatrixXd *data;
};

class Layer {
 public:
  virtual ~Layer() = default;
  // x has one sample per row.
  virtual Eigen::MatrixXd forward(const Eigen::MatrixXd &x, bool train) = 0;
  virtual Eigen::MatrixXd backward(const Eigen::MatrixXd &dy) = 0;
  virtual void collect_params(std::vector<Param *> &out) {}
  virtual void collect_tensors(std::vector<NamedTensor> &out) {}
  virtual std::unique_ptr<Layer> clone() const = 0;

 protected:
  void require_cache(bool have, const char *who) const {
    if (!have) throw std::logic_error(std::string(who) + ": backward before forward");
  }
};

// y = x * W^T + b, W is out x in.
class DenseLayer : public Layer {
 public:
  DenseLayer() = default;  // empty layer, assign before use
  DenseLayer(const std::string &name, int in_dim, int out_dim, Rng &rng)
      : weight_(name + ".weight", Eigen::MatrixXd(out_dim, in_dim)),
        bias_(name + ".bias", Eigen::MatrixXd::Zero(1, out_dim)) {
    // Glorot uniform init, row-major fill for seed stability.
    const double a = std::sqrt(6.0 / (in_dim + out_dim));
    for (int i = 0; i < out_dim; ++i)
      for (int j = 0; j < in_dim; ++j)
        weight_.value(i, j) = rng.uniform(-a, a);
  }

  Eigen::MatrixXd forward(const Eigen::MatrixXd &x, bool) override {
    if (x.cols() != weight_.value.cols())
      throw std::invalid_argument(weight_.name + ": input width " + std::to_string(x.cols()) +
                                  " does not match layer input dimension " +
                                  std::to_string(weight_.value.cols()));
    input_ = x;
    has_cache_ = true;
    return (x * weight_.value.transpose()).rowwise() + bias_.value.row(0);
  }

  Eigen::MatrixXd backward(const Eigen::MatrixXd &dy) override {
    require_cache(has_cache_, "DenseLayer");
    weight_.grad.noalias() += dy.transpose() * input_;
    bias_.grad.row(0) += dy.colwise().sum();
    return dy * weight_.value;
  }

  void collect_params(std::vector<Param *> &out) override {
    out.push_back(&weight_);
    out.push_back(&bias_);
  }
  void collect_tensors(std::vector<NamedTensor> &out) override {
    out.push_back({weight_.name, &weight_.value});
    out.push_back({bias_.name, &bias_.value});
  }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<DenseLayer>(*this); }

  int in_dim() const { return static_cast<int>(weight_.value.cols()); }
  int out_dim() const { return static_cast<int>(weight_.value.rows()); }
  Param &weight() { return weight_; }
  Param &bias() { return bias_; }

 private:
  Param weight_, bias_;
  Eigen::MatrixXd input_;
  bool has_cache_ = false;
};

// Elementwise max(x, slope * x).
class LeakyReluLayer : public Layer {
 public:
  explicit LeakyReluLayer(double slope = 0.01) : slope_(slope) {
    if (!(slope > 0.0 && slope < 1.0))
      throw std::invalid_argument("LeakyReluLayer: slope must be in (0, 1)");
  }

  Eigen::MatrixXd forward(const Eigen::MatrixXd &x, bool) override {
    input_ = x;
    has_cache_ = true;
    return x.cwiseMax(slope_ * x);
  }

  Eigen::MatrixXd backward(const Eigen::MatrixXd &dy) override {
    require_cache(has_cache_, "LeakyReluLayer");
    return (input_.array() > 0.0).select(dy, slope_ * dy);
  }

  std::unique_ptr<Layer> clone() const override { return std::make_unique<LeakyReluLayer>(*this); }

 private:
  double slope_;
  Eigen::MatrixXd input_;
  bool has_cache_ = false;
};

inline double leaky_relu(double x, double slope = 0.01) { return x > 0.0 ? x : slope * x; }

// Batch normalization. Train mode normalizes with batch statistics and
// updates running statistics; eval mode is a pure function of the stored
// running statistics. Running variance uses the unbiased batch estimate.
class BatchNormLayer : public Layer {
 public:
  BatchNormLayer(const std::string &name, int dim, double momentum = 0.1, double epsilon = 1e-5)
      : gamma_(name + ".gamma", Eigen::MatrixXd::Ones(1, dim)),
        beta_(name + ".beta", Eigen::MatrixXd::Zero(1, dim)),
        running_mean_(Eigen::MatrixXd::Zero(1, dim)),
        running_var_(Eigen::MatrixXd::Ones(1, dim)),
        momentum_(momentum),
        epsilon_(epsilon),
        name_(name) {
    if (!(momentum > 0.0 && momentum < 1.0))
      throw std::invalid_argument("BatchNormLayer: momentum must be in (0, 1)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("BatchNormLayer: epsilon must be > 0");
  }

  Eigen::MatrixXd forward(const Eigen::MatrixXd &x, bool train) override {
    const int dim = static_cast<int>(gamma_.value.cols());
    if (x.cols() != dim) throw std::invalid_argument(name_ + ": feature width mismatch");
    Eigen::MatrixXd y(x.rows(), x.cols());
    if (train) {
      if (x.rows() < 2)
        throw std::invalid_argument(name_ + ": train-mode batch must have size >= 2");
      const double batch = static_cast<double>(x.rows());
      centered_.resize(x.rows(), x.cols());
      xhat_.resize(x.rows(), x.cols());
      ivar_.resize(dim);
      for (int j = 0; j < dim; ++j) {
        const double mean = x.col(j).mean();
        centered_.col(j) = x.col(j).array() - mean;
        const double var = centered_.col(j).squaredNorm() / batch;
        ivar_(j) = 1.0 / std::sqrt(var + epsilon_);
        xhat_.col(j) = centered_.col(j) * ivar_(j);
        y.col(j) = gamma_.value(0, j) * xhat_.col(j).array() + beta_.value(0, j);
        running_mean_(0, j) = (1.0 - momentum_) * running_mean_(0, j) + momentum_ * mean;
        running_var_(0, j) = (1.0 - momentum_) * running_var_(0, j) +
                             momentum_ * var * (batch / (batch - 1.0));
      }
      train_cache_ = true;
      return y;
    }
    for (int j = 0; j < dim; ++j) {
      const double ivar = 1.0 / std::sqrt(running_var_(0, j) + epsilon_);
      y.col(j) = gamma_.value(0, j) * ((x.col(j).array() - running_mean_(0, j)) * ivar) +
                 beta_.value(0, j);
    }
    train_cache_ = false;
    return y;
  }

  Eigen::MatrixXd backward(const Eigen::MatrixXd &dy) override {
    require_cache(train_cache_, "BatchNormLayer");
    const double batch = static_cast<double>(dy.rows());
    const int dim = static_cast<int>(gamma_.value.cols());
    Eigen::MatrixXd dx(dy.rows(), dy.cols());
    for (int j = 0; j < dim; ++j) {
      gamma_.grad(0, j) += dy.col(j).dot(xhat_.col(j));
      beta_.grad(0, j) += dy.col(j).sum();
      const Eigen::VectorXd dxhat = dy.col(j) * gamma_.value(0, j);
      const double iv = ivar_(j);
      const double dvar = dxhat.dot(centered_.col(j)) * (-0.5) * iv * iv * iv;
      const double dmean =
          -iv * dxhat.sum() + dvar * (-2.0 / batch) * centered_.col(j).sum();
      dx.col(j) = dxhat.array() * iv + centered_.col(j).array() * (2.0 * dvar / batch) +
                  dmean / batch;
    }
    return dx;
  }

  void collect_params(std::vector<Param *> &out) override {
    out.push_back(&gamma_);
    out.push_back(&beta_);
  }
  void collect_tensors(std::vector<NamedTensor> &out) override {
    out.push_back({gamma_.name, &gamma_.value});
    out.push_back({beta_.name, &beta_.value});
    out.push_back({name_ + ".running_mean", &running_mean_});
    out.push_back({name_ + ".running_var", &running_var_});
  }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<BatchNormLayer>(*this); }

  const Eigen::MatrixXd &running_mean() const { return running_mean_; }
  const Eigen::MatrixXd &running_var() const { return running_var_; }

 private:
  Param gamma_, beta_;
  Eigen::MatrixXd running_mean_, running_var_;
  double momentum_, epsilon_;
  std::string name_;
  Eigen::MatrixXd centered_, xhat_;
  Eigen::RowVectorXd ivar_;
  bool train_cache_ = false;
};

// z = mu + exp(0.5 * logvar) .* noise
inline Eigen::VectorXd reparameterize(const Eigen::VectorXd &mu, const Eigen::VectorXd &logvar,
                                      const Eigen::VectorXd &noise) {
  if (mu.size() != logvar.size() || mu.size() != noise.size())
    throw std::invalid_argument("reparameterize: shape mismatch");
  return mu.array() + (0.5 * logvar.array()).exp() * noise.array();
}

// Sequential layer stack with value semantics (deep copy clones the tape).
class Mlp {
 public:
  Mlp() = default;
  Mlp(const Mlp &other) { *this = other; }
  Mlp &operator=(const Mlp &other) {
    if (this != &other) {
      layers_.clear();
      layers_.reserve(other.layers_.size());
      for (const auto &l : other.layers_) layers_.push_back(l->clone());
    }
    return *this;
  }
  Mlp(Mlp &&) = default;
  Mlp &operator=(Mlp &&) = default;

  void add(std::unique_ptr<Layer> layer) { layers_.push_back(std::move(layer)); }

  Eigen::MatrixXd forward(const Eigen::MatrixXd &x, bool train) {
    Eigen::MatrixXd h = x;
    for (auto &l : layers_) h = l->forward(h, train);
    return h;
  }

  Eigen::MatrixXd backward(const Eigen::MatrixXd &dy) {
    Eigen::MatrixXd g = dy;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
    return g;
  }

  void collect_params(std::vector<Param *> &out) {
    for (auto &l : layers_) l->collect_params(out);
  }
  void collect_tensors(std::vector<NamedTensor> &out) {
    for (auto &l : layers_) l->collect_tensors(out);
  }
  std::size_t size() const { return layers_.size(); }

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

inline void zero_grads(const std::vector<Param *> &params) {
  for (Param *p : params) p->grad.setZero();
}

// Bias-corrected Adam. Moment buffers are allocated on the first step and
// keyed by parameter order, which must stay stable across steps.
class Adam {
 public:
  explicit Adam(double learning_rate = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(const std::vector<Param *> &params) {
    if (m_.empty()) {
      m_.reserve(params.size());
      v_.reserve(params.size());
      for (const Param *p : params) {
        m_.push_back(Eigen::ArrayXXd::Zero(p->value.rows(), p->value.cols()));
        v_.push_back(Eigen::ArrayXXd::Zero(p->value.rows(), p->value.cols()));
      }
    }
    if (m_.size() != params.size())
      throw std::invalid_argument("Adam::step: parameter list changed size");
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      Param &p = *params[i];
      if (!p.grad.allFinite())
        throw std::runtime_error("Adam::step: non-finite gradient for parameter '" + p.name + "'");
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p.grad.array();
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p.grad.array().square();
      p.value.array() -= lr_ * (m_[i] / bc1) / ((v_[i] / bc2).sqrt() + eps_);
    }
  }

  std::int64_t step_count() const { return t_; }
  double learning_rate() const { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::vector<Eigen::ArrayXXd> m_, v_;
};

}  // namespace genchan

#endif
