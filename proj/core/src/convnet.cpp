// src/convnet.cpp

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

#include "facevox/convnet.hpp"

#include "facevox/error.hpp"

namespace facevox {

int EmbeddingLayerIndex(const LayeredNetwork &net) {
  if (net.layers.size() < 2) throw ParameterError("embedder: too few layers");
  return int(net.layers.size()) - 2;
}

LayeredNetwork MakeEmbedderNetwork(const EmbedderConfig &config) {
  if (config.image_size < 8 || config.image_size % 4 != 0) {
    throw ParameterError("embedder: image size must be a multiple of 4, >= 8");
  }
  if (config.conv_channels < 1 || config.trunk_units < 1 ||
      config.embedding_dim < 1 || config.n_classes < 2) {
    throw ParameterError("embedder: bad layer sizes");
  }
  LayeredNetwork net;
  net.input_shape = TensorShape{1, config.image_size, config.image_size};
  net.layers.push_back(
      MakeConv(1, config.conv_channels, 3, Activation::kTanh));
  net.layers.push_back(MaxPool2dLayer{2});
  net.layers.push_back(
      MakeConv(config.conv_channels, config.conv_channels, 3,
               Activation::kTanh));
  net.layers.push_back(MaxPool2dLayer{2});
  const TensorShape shape = OutputShape(net);
  net.layers.push_back(
      MakeDense(shape.Size(), config.trunk_units, Activation::kTanh));
  net.layers.push_back(
      MakeDense(config.trunk_units, config.embedding_dim, Activation::kTanh));
  net.layers.push_back(
      MakeDense(config.embedding_dim, config.n_classes, Activation::kSoftmax));
  InitializeWeights(net, config.seed);
  return net;
}

Eigen::VectorXd ImageToInput(const GrayImage &image) {
  Eigen::VectorXd x(image.width * image.height);
  for (int y = 0; y < image.height; ++y) {
    for (int x_pos = 0; x_pos < image.width; ++x_pos) {
      x(y * image.width + x_pos) = image.At(x_pos, y) / 255.0;
    }
  }
  return x;
}

Eigen::VectorXd ExtractEmbedding(const LayeredNetwork &net,
                                 const GrayImage &image) {
  if (image.width * image.height != net.input_shape.Size()) {
    throw ParameterError("embedder: image does not match network input");
  }
  const ForwardTrace trace = Forward(net, ImageToInput(image));
  return trace.activations[size_t(EmbeddingLayerIndex(net)) + 1];
}

TrainingTrace TrainEmbedder(LayeredNetwork &net,
                            const std::vector<GrayImage> &images,
                            const std::vector<int> &labels, int n_classes,
                            const TrainingOptions &options) {
  if (images.empty() || images.size() != labels.size()) {
    throw InsufficientDataError("embedder: bad training set");
  }
  Eigen::MatrixXd inputs(int(images.size()), net.input_shape.Size());
  Eigen::MatrixXd targets =
      Eigen::MatrixXd::Zero(int(images.size()), n_classes);
  for (size_t i = 0; i < images.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= n_classes) {
      throw ParameterError("embedder: label out of range");
    }
    inputs.row(int(i)) = ImageToInput(images[i]);
    targets(int(i), labels[i]) = 1.0;
  }
  TrainingTrace trace;
  TrainNetwork(net, inputs, targets, options, &trace);
  return trace;
}

}  // namespace facevox
