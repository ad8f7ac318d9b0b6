// include/facevox/convnet.hpp

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

#ifndef FACEVOX_CONVNET_HPP_
#define FACEVOX_CONVNET_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "facevox/image.hpp"
#include "facevox/network.hpp"
#include "facevox/optimizer.hpp"

namespace facevox {

// Small convolutional embedder for fixed-size grayscale crops:
// two conv(3x3, relu-free sigmoid stack is avoided; tanh keeps
// gradients bounded) + 2x2 max-pool blocks, one tanh dense trunk,
// a tanh embedding layer, then a softmax identity head.
struct EmbedderConfig {
  int image_size = 32;      // square input edge, pixels
  int conv_channels = 8;    // channels in both conv blocks
  int trunk_units = 64;
  int embedding_dim = 16;
  int n_classes = 2;
  uint64_t seed = 0;
};

// Index of the layer whose activations form the embedding
// (the dense layer right before the softmax head).
int EmbeddingLayerIndex(const LayeredNetwork &net);

// Builds the topology above with seeded initial weights.
LayeredNetwork MakeEmbedderNetwork(const EmbedderConfig &config);

// Row-major pixels scaled from [0, 255] to [0, 1].
Eigen::VectorXd ImageToInput(const GrayImage &image);

// Activations of the embedding layer for one input image.
Eigen::VectorXd ExtractEmbedding(const LayeredNetwork &net,
                                 const GrayImage &image);

// Supervised training of the full network (embedder + softmax head)
// on labeled crops. Labels are class indices in [0, n_classes).
TrainingTrace TrainEmbedder(LayeredNetwork &net,
                            const std::vector<GrayImage> &images,
                            const std::vector<int> &labels, int n_classes,
                            const TrainingOptions &options);

}  // namespace facevox

#endif  // FACEVOX_CONVNET_HPP_
