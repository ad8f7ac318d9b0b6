// facevox/network.hpp

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

#ifndef FACEVOX_NETWORK_HPP_
#define FACEVOX_NETWORK_HPP_

#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace facevox {

enum class Activation { kLinear, kSigmoid, kTanh, kSoftmax };

// Fully-connected layer computing f(W a + b).
struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out
  Activation activation = Activation::kSigmoid;
};

// Valid 2-D cross-correlation, stride 1, square kernel.  Kernel weights are
// stored row-per-output-channel as [in_channel][ky][kx] flattened.
struct Conv2dLayer {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 0;
  Eigen::MatrixXd kernels;  // out_channels x (in_channels * kernel * kernel)
  Eigen::VectorXd bias;     // out_channels
  Activation activation = Activation::kSigmoid;
};

// Non-overlapping max pooling with square window (stride == window).
// Trailing rows/columns that do not fill a window are dropped.
struct MaxPool2dLayer {
  int window = 0;
};

using Layer = std::variant<DenseLayer, Conv2dLayer, MaxPool2dLayer>;

// Tensor extent flowing between layers, flattened channel-major:
// index = (c * height + y) * width + x.  Plain vectors use {1, 1, dim}.
struct TensorShape {
  int channels = 1;
  int height = 1;
  int width = 1;
  int Size() const { return channels * height * width; }
};

// An ordered stack of layers; shared by multilayer perceptrons, unrolled
// belief-network stacks and the convolutional embedder.
struct LayeredNetwork {
  TensorShape input_shape;
  std::vector<Layer> layers;
};

// Output spatial extent of a valid stride-1 correlation.
int ConvOutputExtent(int input_extent, int kernel);

// Number of trainable parameters in a conv layer:
// kernel^2 * in_channels * out_channels + out_channels.
int ConvParameterCount(const Conv2dLayer &layer);

TensorShape OutputShape(const LayeredNetwork &net);

// Layer constructors with zeroed parameters.
DenseLayer MakeDense(int in, int out, Activation act);
Conv2dLayer MakeConv(int in_channels, int out_channels, int kernel,
                     Activation act);

// Uniform initialization on +-sqrt(6 / (fan_in + fan_out)); biases zero.
void InitializeWeights(LayeredNetwork &net, uint64_t seed);

// Everything the backward pass needs from one forward evaluation.
struct ForwardTrace {
  std::vector<Eigen::VectorXd> activations;  // layers+1 entries; [0] = input
  std::vector<Eigen::VectorXd> preacts;      // per layer; empty for pooling
  std::vector<TensorShape> shapes;           // layers+1 entries
  std::vector<std::vector<int>> pool_argmax;  // per layer; input indices

  const Eigen::VectorXd &Output() const { return activations.back(); }
};

// Optional per-layer multiplicative masks on layer outputs (inverted
// dropout: entries are 0 or 1/(1-rate)).  An empty vector means no mask.
using DropoutMasks = std::vector<Eigen::VectorXd>;

ForwardTrace Forward(const LayeredNetwork &net, const Eigen::VectorXd &input,
                     const DropoutMasks *masks = nullptr);

enum class LossKind { kCrossEntropy, kMse };

// Cross entropy is averaged over output nodes,
//   -(1/n) sum_k [y ln z + (1-y) ln(1-z)],
// with predictions clamped to [1e-12, 1-1e-12] before the logs.  With a
// softmax head the categorical reading -(1/n) sum_k y ln z applies instead
// (set `categorical`); both make the output delta exactly (z - y)/n.
// Mean squared error carries the conventional 1/2:  (1/2) sum_k (z-y)^2.
double LossValue(const Eigen::VectorXd &prediction,
                 const Eigen::VectorXd &target, LossKind kind,
                 bool categorical = false);

// Weight-decay and sparsity penalties added to the batch objective:
//   l2/2 * sum ||W||^2  +  l1 * sum ||W||_1
// over weight matrices and conv kernels; biases are never penalized.
// The l1 subgradient at exactly zero is taken as zero.
struct Regularizers {
  double l2 = 0.0;
  double l1 = 0.0;
};

struct LayerGradients {
  Eigen::MatrixXd weights;  // empty for pooling layers
  Eigen::VectorXd bias;
};

struct NetworkGradients {
  std::vector<LayerGradients> layers;
};

// Mean data loss over the batch plus regularization penalties; the exact
// quantity Backprop differentiates.
double BatchObjective(const LayeredNetwork &net, const Eigen::MatrixXd &inputs,
                      const Eigen::MatrixXd &targets, LossKind loss,
                      const Regularizers &reg = {},
                      const DropoutMasks *masks = nullptr);

// Exact gradient of BatchObjective with respect to every parameter.
// Dropout masks, when supplied, gate both the forward activations and the
// corresponding gradient paths.
NetworkGradients Backprop(const LayeredNetwork &net,
                          const Eigen::MatrixXd &inputs,
                          const Eigen::MatrixXd &targets, LossKind loss,
                          const Regularizers &reg = {},
                          const DropoutMasks *masks = nullptr,
                          double *batch_objective = nullptr);

// Flat parameter views used by optimizers and gradient checks.
int ParameterCount(const LayeredNetwork &net);
Eigen::VectorXd FlattenParameters(const LayeredNetwork &net);
void SetParameters(LayeredNetwork &net, const Eigen::VectorXd &flat);
Eigen::VectorXd FlattenGradients(const NetworkGradients &grads);

}  // namespace facevox

#endif  // FACEVOX_NETWORK_HPP_
