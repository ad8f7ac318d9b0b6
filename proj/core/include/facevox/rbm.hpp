// facevox/rbm.hpp

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

#ifndef FACEVOX_RBM_HPP_
#define FACEVOX_RBM_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "facevox/network.hpp"
#include "facevox/optimizer.hpp"
#include "facevox/rng.hpp"

namespace facevox {

// Visible units are binary, or real-valued Gaussian with unit variance
// (inputs are expected standardized in the Gaussian case).
enum class VisibleType { kBernoulli, kGaussian };

struct Rbm {
  Eigen::MatrixXd weights;  // visible x hidden
  Eigen::VectorXd visible_bias;
  Eigen::VectorXd hidden_bias;
  VisibleType visible_type = VisibleType::kBernoulli;

  int VisibleSize() const { return int(weights.rows()); }
  int HiddenSize() const { return int(weights.cols()); }
};

Rbm MakeRbm(int visible, int hidden, VisibleType type, uint64_t seed);

// Joint energy.  Bernoulli: E = -b'v - c'h - v'Wh.
// Gaussian (unit variance): E = ||v - b||^2 / 2 - c'h - v'Wh.
double RbmEnergy(const Rbm &rbm, const Eigen::VectorXd &v,
                 const Eigen::VectorXd &h);

// p(h_j = 1 | v) = sigmoid(v'W + c), identical for both visible types.
Eigen::VectorXd HiddenActivationProbs(const Rbm &rbm, const Eigen::VectorXd &v);

// Probability-valued reconstruction: sigmoid(W h + b) for Bernoulli
// visibles, the conditional mean W h + b for Gaussian visibles.
Eigen::VectorXd VisibleReconstruction(const Rbm &rbm, const Eigen::VectorXd &h);

// One contrastive-divergence step accumulated over a batch (rows are
// samples):  positive phase pairs the data with hidden probabilities;
// hidden states are then sampled once, the visible reconstruction stays
// probability-valued, and the negative phase pairs it with its own hidden
// probabilities.
struct RbmDelta {
  Eigen::MatrixXd weights;
  Eigen::VectorXd visible_bias;
  Eigen::VectorXd hidden_bias;
};

RbmDelta Cd1Delta(const Rbm &rbm, const Eigen::MatrixXd &batch, Rng &rng);

// params += rate * Cd1Delta(...).
void Cd1Update(Rbm &rbm, const Eigen::MatrixXd &batch, double rate, Rng &rng);

// Exact mean log-likelihood of binary data rows by enumerating every
// visible configuration (partition function included).  Only for Bernoulli
// visibles with VisibleSize + HiddenSize <= 20.
double ExactLogLikelihood(const Rbm &rbm, const Eigen::MatrixXd &data);

// Exact p(v) for one binary visible configuration, same restrictions.
double ExactVisibleProbability(const Rbm &rbm, const Eigen::VectorXd &v);

// Greedily pretrained stack; layer l+1 trains on layer l's hidden
// activation probabilities.
struct DbnStack {
  std::vector<Rbm> rbms;
};

struct DbnPretrainOptions {
  int epochs = 5;
  int batch_size = 32;
  double learning_rate = 0.1;
  uint64_t seed = 0;
  VisibleType first_layer_type = VisibleType::kGaussian;
};

DbnStack PretrainDbn(const Eigen::MatrixXd &data,
                     const std::vector<int> &hidden_sizes,
                     const DbnPretrainOptions &options);

// Deterministic upward pass of activation probabilities through the stack.
Eigen::MatrixXd DbnHiddenRepresentation(const DbnStack &stack,
                                        const Eigen::MatrixXd &data);

// Unrolls the stack into a feed-forward network: one sigmoid dense layer
// per RBM (weights transposed) plus a freshly initialized softmax head.
LayeredNetwork UnrollToNetwork(const DbnStack &stack, int n_classes,
                               uint64_t head_seed);

// Pretrained stack -> unrolled network -> supervised backprop fine-tuning.
// targets must be one-hot rows.
LayeredNetwork FineTuneDbn(const DbnStack &stack, const Eigen::MatrixXd &inputs,
                           const Eigen::MatrixXd &targets,
                           const TrainingOptions &options,
                           TrainingTrace *trace = nullptr);

}  // namespace facevox

#endif  // FACEVOX_RBM_HPP_
