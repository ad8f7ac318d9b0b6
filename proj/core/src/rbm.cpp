// src/rbm.cpp

// Copyright 2026  FaceVox Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "facevox/rbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "facevox/error.hpp"

namespace facevox {

namespace {

Eigen::ArrayXd Sigmoid(const Eigen::ArrayXd &z) {
  return 1.0 / (1.0 + (-z).exp());
}

// log(1 + e^x) without overflow.
double Softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

void CheckEnumerable(const Rbm &rbm) {
  if (rbm.visible_type != VisibleType::kBernoulli) {
    throw ParameterError("rbm: exact likelihood needs Bernoulli visibles");
  }
  if (rbm.VisibleSize() + rbm.HiddenSize() > 20) {
    throw ParameterError("rbm: too many units to enumerate exactly");
  }
}

void CheckBinary(const Eigen::MatrixXd &data) {
  for (int i = 0; i < data.rows(); ++i) {
    for (int j = 0; j < data.cols(); ++j) {
      const double v = data(i, j);
      if (v != 0.0 && v != 1.0) {
        throw ParameterError("rbm: exact likelihood expects binary data");
      }
    }
  }
}

// -log unnormalized p(v): F(v) = -b'v - sum_j softplus(v'W_j + c_j).
double FreeEnergy(const Rbm &rbm, const Eigen::VectorXd &v) {
  double acc = -rbm.visible_bias.dot(v);
  const Eigen::VectorXd act = rbm.weights.transpose() * v + rbm.hidden_bias;
  for (int j = 0; j < act.size(); ++j) acc -= Softplus(act(j));
  return acc;
}

double LogPartition(const Rbm &rbm) {
  const int nv = rbm.VisibleSize();
  const uint64_t n_states = uint64_t(1) << nv;
  double max_neg_f = -std::numeric_limits<double>::infinity();
  std::vector<double> neg_f(n_states);
  Eigen::VectorXd v(nv);
  for (uint64_t s = 0; s < n_states; ++s) {
    for (int i = 0; i < nv; ++i) v(i) = double((s >> i) & 1);
    neg_f[s] = -FreeEnergy(rbm, v);
    max_neg_f = std::max(max_neg_f, neg_f[s]);
  }
  double acc = 0.0;
  for (double x : neg_f) acc += std::exp(x - max_neg_f);
  return max_neg_f + std::log(acc);
}

}  // namespace

Rbm MakeRbm(int visible, int hidden, VisibleType type, uint64_t seed) {
  if (visible < 1 || hidden < 1) {
    throw ParameterError("rbm: unit counts must be >= 1");
  }
  Rbm rbm;
  rbm.visible_type = type;
  rbm.weights.resize(visible, hidden);
  Rng rng(seed);
  for (int i = 0; i < visible; ++i) {
    for (int j = 0; j < hidden; ++j) rbm.weights(i, j) = 0.01 * rng.Normal();
  }
  rbm.visible_bias = Eigen::VectorXd::Zero(visible);
  rbm.hidden_bias = Eigen::VectorXd::Zero(hidden);
  return rbm;
}

double RbmEnergy(const Rbm &rbm, const Eigen::VectorXd &v,
                 const Eigen::VectorXd &h) {
  if (v.size() != rbm.VisibleSize() || h.size() != rbm.HiddenSize()) {
    throw ParameterError("rbm: state size mismatch");
  }
  const double interaction = -(v.transpose() * rbm.weights * h)(0, 0) -
                             rbm.hidden_bias.dot(h);
  if (rbm.visible_type == VisibleType::kGaussian) {
    return 0.5 * (v - rbm.visible_bias).squaredNorm() + interaction;
  }
  return -rbm.visible_bias.dot(v) + interaction;
}

Eigen::VectorXd HiddenActivationProbs(const Rbm &rbm,
                                      const Eigen::VectorXd &v) {
  if (v.size() != rbm.VisibleSize()) {
    throw ParameterError("rbm: visible size mismatch");
  }
  return Sigmoid((rbm.weights.transpose() * v + rbm.hidden_bias).array())
      .matrix();
}

Eigen::VectorXd VisibleReconstruction(const Rbm &rbm,
                                      const Eigen::VectorXd &h) {
  if (h.size() != rbm.HiddenSize()) {
    throw ParameterError("rbm: hidden size mismatch");
  }
  const Eigen::VectorXd mean = rbm.weights * h + rbm.visible_bias;
  if (rbm.visible_type == VisibleType::kGaussian) return mean;
  return Sigmoid(mean.array()).matrix();
}

RbmDelta Cd1Delta(const Rbm &rbm, const Eigen::MatrixXd &batch, Rng &rng) {
  if (batch.rows() == 0 || int(batch.cols()) != rbm.VisibleSize()) {
    throw ParameterError("rbm: bad batch shape");
  }
  RbmDelta delta;
  delta.weights =
      Eigen::MatrixXd::Zero(rbm.VisibleSize(), rbm.HiddenSize());
  delta.visible_bias = Eigen::VectorXd::Zero(rbm.VisibleSize());
  delta.hidden_bias = Eigen::VectorXd::Zero(rbm.HiddenSize());

  for (int s = 0; s < batch.rows(); ++s) {
    const Eigen::VectorXd v0 = batch.row(s);
    const Eigen::VectorXd h0 = HiddenActivationProbs(rbm, v0);
    Eigen::VectorXd h_sample(h0.size());
    for (int j = 0; j < h0.size(); ++j) {
      h_sample(j) = rng.Flip(h0(j)) ? 1.0 : 0.0;
    }
    const Eigen::VectorXd v1 = VisibleReconstruction(rbm, h_sample);
    const Eigen::VectorXd h1 = HiddenActivationProbs(rbm, v1);

    delta.weights.noalias() += v0 * h0.transpose() - v1 * h1.transpose();
    delta.visible_bias += v0 - v1;
    delta.hidden_bias += h0 - h1;
  }
  const double inv = 1.0 / double(batch.rows());
  delta.weights *= inv;
  delta.visible_bias *= inv;
  delta.hidden_bias *= inv;
  return delta;
}

void Cd1Update(Rbm &rbm, const Eigen::MatrixXd &batch, double rate, Rng &rng) {
  if (rate <= 0.0) throw ParameterError("rbm: learning rate must be > 0");
  const RbmDelta delta = Cd1Delta(rbm, batch, rng);
  rbm.weights += rate * delta.weights;
  rbm.visible_bias += rate * delta.visible_bias;
  rbm.hidden_bias += rate * delta.hidden_bias;
}

double ExactLogLikelihood(const Rbm &rbm, const Eigen::MatrixXd &data) {
  CheckEnumerable(rbm);
  if (data.rows() == 0 || int(data.cols()) != rbm.VisibleSize()) {
    throw ParameterError("rbm: bad data shape");
  }
  CheckBinary(data);
  const double log_z = LogPartition(rbm);
  double acc = 0.0;
  for (int s = 0; s < data.rows(); ++s) {
    acc += -FreeEnergy(rbm, data.row(s)) - log_z;
  }
  return acc / double(data.rows());
}

double ExactVisibleProbability(const Rbm &rbm, const Eigen::VectorXd &v) {
  CheckEnumerable(rbm);
  Eigen::MatrixXd row(1, v.size());
  row.row(0) = v;
  CheckBinary(row);
  return std::exp(-FreeEnergy(rbm, v) - LogPartition(rbm));
}

DbnStack PretrainDbn(const Eigen::MatrixXd &data,
                     const std::vector<int> &hidden_sizes,
                     const DbnPretrainOptions &options) {
  if (data.rows() == 0) throw InsufficientDataError("dbn: no training data");
  if (hidden_sizes.empty()) throw ParameterError("dbn: empty topology");
  if (options.epochs < 1 || options.batch_size < 1 ||
      options.learning_rate <= 0.0) {
    throw ParameterError("dbn: bad pretraining options");
  }

  DbnStack stack;
  Rng rng(options.seed);
  Eigen::MatrixXd layer_input = data;
  for (size_t l = 0; l < hidden_sizes.size(); ++l) {
    const VisibleType type =
        l == 0 ? options.first_layer_type : VisibleType::kBernoulli;
    Rbm rbm = MakeRbm(int(layer_input.cols()), hidden_sizes[l], type,
                      rng.NextU64());
    const int n = int(layer_input.rows());
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
      const std::vector<int> order = rng.Permutation(n);
      for (int start = 0; start < n; start += options.batch_size) {
        const int b = std::min(options.batch_size, n - start);
        Eigen::MatrixXd batch(b, layer_input.cols());
        for (int i = 0; i < b; ++i) {
          batch.row(i) = layer_input.row(order[size_t(start + i)]);
        }
        Cd1Update(rbm, batch, options.learning_rate, rng);
      }
    }
    // Hidden activation probabilities feed the next layer.
    Eigen::MatrixXd up(n, rbm.HiddenSize());
    for (int i = 0; i < n; ++i) {
      up.row(i) = HiddenActivationProbs(rbm, layer_input.row(i));
    }
    stack.rbms.push_back(std::move(rbm));
    layer_input = std::move(up);
  }
  return stack;
}

Eigen::MatrixXd DbnHiddenRepresentation(const DbnStack &stack,
                                        const Eigen::MatrixXd &data) {
  if (stack.rbms.empty()) throw ParameterError("dbn: empty stack");
  Eigen::MatrixXd x = data;
  for (const Rbm &rbm : stack.rbms) {
    Eigen::MatrixXd up(x.rows(), rbm.HiddenSize());
    for (int i = 0; i < x.rows(); ++i) {
      up.row(i) = HiddenActivationProbs(rbm, x.row(i));
    }
    x = std::move(up);
  }
  return x;
}

LayeredNetwork UnrollToNetwork(const DbnStack &stack, int n_classes,
                               uint64_t head_seed) {
  if (stack.rbms.empty()) throw ParameterError("dbn: empty stack");
  if (n_classes < 2) throw ParameterError("dbn: need >= 2 classes");
  LayeredNetwork net;
  net.input_shape = TensorShape{1, 1, stack.rbms.front().VisibleSize()};
  for (const Rbm &rbm : stack.rbms) {
    DenseLayer layer = MakeDense(rbm.VisibleSize(), rbm.HiddenSize(),
                                 Activation::kSigmoid);
    layer.weights = rbm.weights.transpose();
    layer.bias = rbm.hidden_bias;
    net.layers.push_back(std::move(layer));
  }
  LayeredNetwork head;
  head.input_shape = TensorShape{1, 1, stack.rbms.back().HiddenSize()};
  head.layers.push_back(MakeDense(stack.rbms.back().HiddenSize(), n_classes,
                                  Activation::kSoftmax));
  InitializeWeights(head, head_seed);
  net.layers.push_back(head.layers.front());
  return net;
}

LayeredNetwork FineTuneDbn(const DbnStack &stack, const Eigen::MatrixXd &inputs,
                           const Eigen::MatrixXd &targets,
                           const TrainingOptions &options,
                           TrainingTrace *trace) {
  LayeredNetwork net =
      UnrollToNetwork(stack, int(targets.cols()), options.seed ^ 0x9e3779b9ull);
  TrainNetwork(net, inputs, targets, options, trace);
  return net;
}

}  // namespace facevox
