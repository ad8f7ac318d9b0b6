// src/optimizer.cpp

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

#include "facevox/optimizer.hpp"

#include <cmath>

#include "facevox/error.hpp"

namespace facevox {

Optimizer::Optimizer(const OptimizerConfig &config, int n_params)
    : config_(config) {
  if (n_params < 1) throw ParameterError("optimizer: need >= 1 parameter");
  if (config.learning_rate <= 0.0) {
    throw ParameterError("optimizer: learning rate must be > 0");
  }
  if (config.decay_step < 0 || config.decay_gamma <= 0.0) {
    throw ParameterError("optimizer: bad decay schedule");
  }
  if (config.rho <= 0.0 || config.rho >= 1.0) {
    throw ParameterError("optimizer: rho must lie in (0, 1)");
  }
  if (config.delta <= 0.0) {
    throw ParameterError("optimizer: delta must be > 0");
  }
  if (config.kind != OptimizerKind::kSgd) {
    accumulator_ = Eigen::VectorXd::Zero(n_params);
  }
}

double Optimizer::CurrentLearningRate() const {
  if (config_.decay_step == 0) return config_.learning_rate;
  const int plateau = t_ / config_.decay_step;
  return config_.learning_rate * std::pow(config_.decay_gamma, plateau);
}

void Optimizer::Step(Eigen::VectorXd &params, const Eigen::VectorXd &grad) {
  if (accumulator_.size() > 0 && grad.size() != accumulator_.size()) {
    throw ParameterError("optimizer: gradient size changed between steps");
  }
  if (params.size() != grad.size()) {
    throw ParameterError("optimizer: parameter/gradient size mismatch");
  }
  const double lr = CurrentLearningRate();
  switch (config_.kind) {
    case OptimizerKind::kSgd:
      params -= lr * grad;
      break;
    case OptimizerKind::kAdaGrad:
      accumulator_.array() += grad.array().square();
      params.array() -=
          lr * grad.array() / (accumulator_.array() + config_.delta).sqrt();
      break;
    case OptimizerKind::kRmsProp:
      accumulator_.array() = config_.rho * accumulator_.array() +
                             (1.0 - config_.rho) * grad.array().square();
      params.array() -=
          lr * grad.array() / (accumulator_.array() + config_.delta).sqrt();
      break;
  }
  ++t_;
}

Eigen::VectorXd L2ClosedForm(const Eigen::MatrixXd &x,
                             const Eigen::VectorXd &y, double phi) {
  if (x.rows() != y.size()) {
    throw ParameterError("ridge: row count mismatch");
  }
  if (phi < 0.0) throw ParameterError("ridge: phi must be >= 0");
  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += phi;
  const Eigen::LDLT<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) {
    throw SingularityError("ridge: normal matrix is singular");
  }
  if (gram.size() > 0) {
    // A rank-deficient normal matrix shows up as a (near-)zero LDLT pivot;
    // isPositive() alone accepts semidefinite systems.
    const Eigen::VectorXd d = solver.vectorD();
    const double floor = 1e-12 * std::max(1.0, d.cwiseAbs().maxCoeff());
    if (d.minCoeff() <= floor) {
      throw SingularityError("ridge: normal matrix is singular");
    }
  }
  const Eigen::VectorXd w = solver.solve(x.transpose() * y);
  if (!w.allFinite()) throw SingularityError("ridge: singular solve");
  return w;
}

Eigen::VectorXd MakeDropoutMask(int size, double rate, Rng &rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw ParameterError("dropout: rate must lie in [0, 1)");
  }
  Eigen::VectorXd mask(size);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (int i = 0; i < size; ++i) {
    mask(i) = rng.Flip(rate) ? 0.0 : keep_scale;
  }
  return mask;
}

Eigen::VectorXd DropoutApply(const Eigen::VectorXd &activations, double rate,
                             Rng &rng) {
  return activations.array() *
         MakeDropoutMask(int(activations.size()), rate, rng).array();
}

DropoutMasks MakeNetworkDropoutMasks(const LayeredNetwork &net, double rate,
                                     Rng &rng) {
  DropoutMasks masks(net.layers.size());
  if (rate == 0.0) return masks;
  TensorShape shape = net.input_shape;
  for (size_t li = 0; li < net.layers.size(); ++li) {
    const bool dense = std::holds_alternative<DenseLayer>(net.layers[li]);
    if (const auto *d = std::get_if<DenseLayer>(&net.layers[li])) {
      shape = TensorShape{1, 1, int(d->weights.rows())};
    } else if (const auto *c = std::get_if<Conv2dLayer>(&net.layers[li])) {
      shape = TensorShape{c->out_channels,
                          ConvOutputExtent(shape.height, c->kernel),
                          ConvOutputExtent(shape.width, c->kernel)};
    } else {
      const auto &p = std::get<MaxPool2dLayer>(net.layers[li]);
      shape = TensorShape{shape.channels, shape.height / p.window,
                          shape.width / p.window};
    }
    if (dense && li + 1 < net.layers.size()) {
      masks[li] = MakeDropoutMask(shape.Size(), rate, rng);
    }
  }
  return masks;
}

void TrainNetwork(LayeredNetwork &net, const Eigen::MatrixXd &inputs,
                  const Eigen::MatrixXd &targets,
                  const TrainingOptions &options, TrainingTrace *trace) {
  if (inputs.rows() != targets.rows() || inputs.rows() == 0) {
    throw ParameterError("train: batch must be non-empty and aligned");
  }
  if (options.epochs < 1 || options.batch_size < 1) {
    throw ParameterError("train: epochs and batch size must be >= 1");
  }
  const int n = int(inputs.rows());
  Rng rng(options.seed);
  Optimizer opt(options.optimizer, ParameterCount(net));
  Eigen::VectorXd params = FlattenParameters(net);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const std::vector<int> order = rng.Permutation(n);
    double epoch_objective = 0.0;
    int n_batches = 0;
    for (int start = 0; start < n; start += options.batch_size) {
      const int b = std::min(options.batch_size, n - start);
      Eigen::MatrixXd bx(b, inputs.cols());
      Eigen::MatrixXd by(b, targets.cols());
      for (int i = 0; i < b; ++i) {
        bx.row(i) = inputs.row(order[size_t(start + i)]);
        by.row(i) = targets.row(order[size_t(start + i)]);
      }
      const DropoutMasks masks =
          MakeNetworkDropoutMasks(net, options.dropout_rate, rng);
      double objective = 0.0;
      const NetworkGradients grads =
          Backprop(net, bx, by, options.loss, options.regularizers,
                   options.dropout_rate > 0.0 ? &masks : nullptr, &objective);
      opt.Step(params, FlattenGradients(grads));
      SetParameters(net, params);
      epoch_objective += objective;
      ++n_batches;
    }
    if (trace) trace->epoch_objective.push_back(epoch_objective / n_batches);
  }
}

}  // namespace facevox
