// facevox/optimizer.hpp

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

#ifndef FACEVOX_OPTIMIZER_HPP_
#define FACEVOX_OPTIMIZER_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "facevox/network.hpp"
#include "facevox/rng.hpp"

namespace facevox {

enum class OptimizerKind { kSgd, kAdaGrad, kRmsProp };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kSgd;
  double learning_rate = 0.01;
  // Step decay: the effective rate is learning_rate * gamma^floor(t / step)
  // with t counting completed steps; step == 0 disables decay.
  double decay_gamma = 1.0;
  int decay_step = 0;
  // Accumulator decay for RMSProp: acc = rho * acc + (1 - rho) g^2.
  double rho = 0.9;
  // Stabilizer added inside the square root of the adaptive division.
  double delta = 1e-7;
};

// First-order update rule over a flat parameter vector.
//   SGD:      p -= lr_t g
//   AdaGrad:  acc += g^2;                 p -= lr_t g / sqrt(acc + delta)
//   RMSProp:  acc = rho acc + (1-rho)g^2; p -= lr_t g / sqrt(acc + delta)
class Optimizer {
 public:
  Optimizer(const OptimizerConfig &config, int n_params);

  void Step(Eigen::VectorXd &params, const Eigen::VectorXd &grad);

  // Rate the *next* Step call will use.
  double CurrentLearningRate() const;
  int CompletedSteps() const { return t_; }

 private:
  OptimizerConfig config_;
  Eigen::VectorXd accumulator_;
  int t_ = 0;
};

// Ridge regression w = (X'X + phi I)^-1 X'y; the closed-form solution every
// weight-decay gradient method should converge to on a linear model.
// phi == 0 is allowed only when X'X is invertible.
Eigen::VectorXd L2ClosedForm(const Eigen::MatrixXd &x,
                             const Eigen::VectorXd &y, double phi);

// Inverted-dropout mask: entries are 0 with probability rate, otherwise
// 1/(1 - rate), so the masked activation is unbiased in expectation.
// rate must lie in [0, 1).
Eigen::VectorXd MakeDropoutMask(int size, double rate, Rng &rng);

// Applies a fresh mask to an activation vector.
Eigen::VectorXd DropoutApply(const Eigen::VectorXd &activations, double rate,
                             Rng &rng);

// Masks for every hidden dense layer of a network (never the final layer,
// never conv/pool outputs); rate 0 yields all-empty masks.
DropoutMasks MakeNetworkDropoutMasks(const LayeredNetwork &net, double rate,
                                     Rng &rng);

// Seeded minibatch training: shuffles each epoch, draws fresh dropout
// masks per batch, and steps the optimizer on the flattened gradient.
struct TrainingOptions {
  OptimizerConfig optimizer;
  Regularizers regularizers;
  LossKind loss = LossKind::kCrossEntropy;
  double dropout_rate = 0.0;
  int epochs = 1;
  int batch_size = 32;
  uint64_t seed = 0;
};

struct TrainingTrace {
  std::vector<double> epoch_objective;  // mean batch objective per epoch
};

void TrainNetwork(LayeredNetwork &net, const Eigen::MatrixXd &inputs,
                  const Eigen::MatrixXd &targets,
                  const TrainingOptions &options,
                  TrainingTrace *trace = nullptr);

}  // namespace facevox

#endif  // FACEVOX_OPTIMIZER_HPP_
