// include/facevox/face_align.hpp

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

#ifndef FACEVOX_FACE_ALIGN_HPP_
#define FACEVOX_FACE_ALIGN_HPP_

#include <vector>

#include <Eigen/Dense>

#include "facevox/image.hpp"

namespace facevox {

// A shape is a flat vector of interleaved landmark coordinates
// (x0, y0, x1, y1, ...).
int ShapeLandmarkCount(const Eigen::VectorXd &shape);

// Local appearance around each landmark: a square patch of raw pixels
// centered on the rounded landmark (clamped so the patch stays inside
// the image), mean-subtracted and L2-normalized per patch, then
// concatenated. Constant patches normalize to zeros.
Eigen::VectorXd ShapeDescriptor(const GrayImage &image,
                                const Eigen::VectorXd &shape,
                                int patch_radius = 5);

int ShapeDescriptorSize(int n_landmarks, int patch_radius = 5);

// One cascade stage maps the descriptor at the current shape to a
// shape increment: x_next = x + map * phi + offset.
struct SdmStage {
  Eigen::MatrixXd map;
  Eigen::VectorXd offset;
};

struct SdmModel {
  int n_landmarks = 0;
  int patch_radius = 5;
  Eigen::VectorXd mean_shape;  // default starting shape
  std::vector<SdmStage> stages;
};

struct SdmTrainOptions {
  int n_stages = 4;
  int patch_radius = 5;
  double ridge = 1e-6;  // scaled by the mean diagonal of the normal matrix
};

// Fits the cascade by regressing target-minus-current shape deltas on
// descriptors, one stage at a time, updating training shapes after
// each stage. Initial shapes default to the mean of the targets when
// omitted.
SdmModel SdmTrain(const std::vector<GrayImage> &images,
                  const std::vector<Eigen::VectorXd> &target_shapes,
                  const std::vector<Eigen::VectorXd> &initial_shapes,
                  const SdmTrainOptions &options);
SdmModel SdmTrain(const std::vector<GrayImage> &images,
                  const std::vector<Eigen::VectorXd> &target_shapes,
                  const SdmTrainOptions &options);

Eigen::VectorXd SdmPredict(const SdmModel &model, const GrayImage &image,
                           const Eigen::VectorXd &initial_shape);
Eigen::VectorXd SdmPredict(const SdmModel &model, const GrayImage &image);

// x' = a x + b y + c, y' = d x + e y + f.
struct AffineTransform {
  Eigen::Matrix2d linear = Eigen::Matrix2d::Identity();
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();

  Eigen::Vector2d Apply(const Eigen::Vector2d &p) const {
    return linear * p + offset;
  }
};

// Least-squares affine map taking src points onto dst points (both as
// interleaved shape vectors, >= 3 landmarks). Degenerate point sets
// (for example collinear) raise SingularityError.
AffineTransform EstimateAffine(const Eigen::VectorXd &src,
                               const Eigen::VectorXd &dst);

AffineTransform InvertAffine(const AffineTransform &transform);

Eigen::VectorXd ApplyAffineToShape(const AffineTransform &transform,
                                   const Eigen::VectorXd &shape);

// Renders the transformed image on an out_width x out_height canvas by
// sampling the source at the inverse-mapped position of every output
// pixel. Samples outside the source are zero.
GrayImage WarpImage(const GrayImage &image, const AffineTransform &transform,
                    int out_width, int out_height);

// Fixed five-landmark layout (eye centers, nose tip, mouth corners)
// on a square canvas, used as the alignment target.
Eigen::VectorXd CanonicalLandmarks(int size);

// Warps the face so its landmarks land on the canonical layout.
GrayImage AlignFace(const GrayImage &image, const Eigen::VectorXd &landmarks,
                    int size);

}  // namespace facevox

#endif  // FACEVOX_FACE_ALIGN_HPP_
