// src/face_align.cpp

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

#include "facevox/face_align.hpp"

#include <algorithm>
#include <cmath>

#include "facevox/error.hpp"

namespace facevox {

namespace {

constexpr double kZeroNorm = 1e-12;

void CheckShape(const Eigen::VectorXd &shape) {
  if (shape.size() < 2 || shape.size() % 2 != 0) {
    throw ParameterError("shape: need interleaved (x, y) pairs");
  }
}

int ClampCenter(double coordinate, int radius, int extent) {
  const int rounded = int(std::lround(coordinate));
  return std::clamp(rounded, radius, extent - 1 - radius);
}

}  // namespace

int ShapeLandmarkCount(const Eigen::VectorXd &shape) {
  CheckShape(shape);
  return int(shape.size()) / 2;
}

int ShapeDescriptorSize(int n_landmarks, int patch_radius) {
  const int side = 2 * patch_radius + 1;
  return n_landmarks * side * side;
}

Eigen::VectorXd ShapeDescriptor(const GrayImage &image,
                                const Eigen::VectorXd &shape,
                                int patch_radius) {
  const int n = ShapeLandmarkCount(shape);
  if (patch_radius < 1) throw ParameterError("descriptor: radius must be >= 1");
  const int side = 2 * patch_radius + 1;
  if (image.width < side || image.height < side) {
    throw ParameterError("descriptor: image smaller than a patch");
  }
  Eigen::VectorXd descriptor(ShapeDescriptorSize(n, patch_radius));
  int pos = 0;
  for (int l = 0; l < n; ++l) {
    const int cx = ClampCenter(shape(2 * l), patch_radius, image.width);
    const int cy = ClampCenter(shape(2 * l + 1), patch_radius, image.height);
    Eigen::VectorXd patch(side * side);
    int k = 0;
    for (int dy = -patch_radius; dy <= patch_radius; ++dy) {
      for (int dx = -patch_radius; dx <= patch_radius; ++dx) {
        patch(k++) = image.At(cx + dx, cy + dy);
      }
    }
    patch.array() -= patch.mean();
    const double norm = patch.norm();
    if (norm > kZeroNorm) patch /= norm;
    else patch.setZero();
    descriptor.segment(pos, side * side) = patch;
    pos += side * side;
  }
  return descriptor;
}

SdmModel SdmTrain(const std::vector<GrayImage> &images,
                  const std::vector<Eigen::VectorXd> &target_shapes,
                  const std::vector<Eigen::VectorXd> &initial_shapes,
                  const SdmTrainOptions &options) {
  if (images.empty() || images.size() != target_shapes.size() ||
      images.size() != initial_shapes.size()) {
    throw InsufficientDataError("sdm: inconsistent training set");
  }
  if (options.n_stages < 1 || options.ridge < 0.0) {
    throw ParameterError("sdm: bad options");
  }
  const int n_landmarks = ShapeLandmarkCount(target_shapes.front());
  for (size_t i = 0; i < images.size(); ++i) {
    if (ShapeLandmarkCount(target_shapes[i]) != n_landmarks ||
        ShapeLandmarkCount(initial_shapes[i]) != n_landmarks) {
      throw ParameterError("sdm: landmark count varies across samples");
    }
  }
  const int n = int(images.size());
  const int shape_dim = 2 * n_landmarks;
  const int desc_dim = ShapeDescriptorSize(n_landmarks, options.patch_radius);

  SdmModel model;
  model.n_landmarks = n_landmarks;
  model.patch_radius = options.patch_radius;
  model.mean_shape = Eigen::VectorXd::Zero(shape_dim);
  for (const Eigen::VectorXd &s : target_shapes) model.mean_shape += s;
  model.mean_shape /= double(n);

  std::vector<Eigen::VectorXd> current = initial_shapes;
  for (int stage = 0; stage < options.n_stages; ++stage) {
    Eigen::MatrixXd design(n, desc_dim + 1);
    Eigen::MatrixXd deltas(n, shape_dim);
    for (int i = 0; i < n; ++i) {
      design.row(i).head(desc_dim) =
          ShapeDescriptor(images[size_t(i)], current[size_t(i)],
                          options.patch_radius);
      design(i, desc_dim) = 1.0;
      deltas.row(i) = target_shapes[size_t(i)] - current[size_t(i)];
    }
    Eigen::MatrixXd normal = design.transpose() * design;
    const double scale =
        options.ridge * normal.trace() / double(normal.rows());
    normal.diagonal().array() += scale;
    const Eigen::MatrixXd solution =
        normal.ldlt().solve(design.transpose() * deltas);

    SdmStage fitted;
    fitted.map = solution.topRows(desc_dim).transpose();
    fitted.offset = solution.row(desc_dim).transpose();
    for (int i = 0; i < n; ++i) {
      current[size_t(i)] +=
          fitted.map * design.row(i).head(desc_dim).transpose() +
          fitted.offset;
    }
    model.stages.push_back(std::move(fitted));
  }
  return model;
}

SdmModel SdmTrain(const std::vector<GrayImage> &images,
                  const std::vector<Eigen::VectorXd> &target_shapes,
                  const SdmTrainOptions &options) {
  if (target_shapes.empty()) throw InsufficientDataError("sdm: no targets");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(target_shapes.front().size());
  for (const Eigen::VectorXd &s : target_shapes) mean += s;
  mean /= double(target_shapes.size());
  std::vector<Eigen::VectorXd> initial(target_shapes.size(), mean);
  return SdmTrain(images, target_shapes, initial, options);
}

Eigen::VectorXd SdmPredict(const SdmModel &model, const GrayImage &image,
                           const Eigen::VectorXd &initial_shape) {
  if (ShapeLandmarkCount(initial_shape) != model.n_landmarks) {
    throw ParameterError("sdm: shape does not match model");
  }
  Eigen::VectorXd shape = initial_shape;
  for (const SdmStage &stage : model.stages) {
    const Eigen::VectorXd phi =
        ShapeDescriptor(image, shape, model.patch_radius);
    shape += stage.map * phi + stage.offset;
  }
  return shape;
}

Eigen::VectorXd SdmPredict(const SdmModel &model, const GrayImage &image) {
  return SdmPredict(model, image, model.mean_shape);
}

AffineTransform EstimateAffine(const Eigen::VectorXd &src,
                               const Eigen::VectorXd &dst) {
  CheckShape(src);
  if (src.size() != dst.size()) {
    throw ParameterError("affine: point counts differ");
  }
  const int n = int(src.size()) / 2;
  if (n < 3) throw ParameterError("affine: need at least 3 points");

  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(2 * n, 6);
  Eigen::VectorXd rhs(2 * n);
  for (int i = 0; i < n; ++i) {
    const double x = src(2 * i);
    const double y = src(2 * i + 1);
    system(2 * i, 0) = x;
    system(2 * i, 1) = y;
    system(2 * i, 2) = 1.0;
    system(2 * i + 1, 3) = x;
    system(2 * i + 1, 4) = y;
    system(2 * i + 1, 5) = 1.0;
    rhs(2 * i) = dst(2 * i);
    rhs(2 * i + 1) = dst(2 * i + 1);
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(system);
  if (qr.rank() < 6) {
    throw SingularityError("affine: degenerate point configuration");
  }
  const Eigen::VectorXd params = qr.solve(rhs);

  AffineTransform transform;
  transform.linear << params(0), params(1), params(3), params(4);
  transform.offset << params(2), params(5);
  return transform;
}

AffineTransform InvertAffine(const AffineTransform &transform) {
  const double det = transform.linear.determinant();
  if (std::abs(det) < 1e-12) {
    throw SingularityError("affine: transform is not invertible");
  }
  AffineTransform inverse;
  inverse.linear = transform.linear.inverse();
  inverse.offset = -inverse.linear * transform.offset;
  return inverse;
}

Eigen::VectorXd ApplyAffineToShape(const AffineTransform &transform,
                                   const Eigen::VectorXd &shape) {
  CheckShape(shape);
  Eigen::VectorXd out(shape.size());
  for (int i = 0; i < shape.size() / 2; ++i) {
    const Eigen::Vector2d p =
        transform.Apply(Eigen::Vector2d(shape(2 * i), shape(2 * i + 1)));
    out(2 * i) = p(0);
    out(2 * i + 1) = p(1);
  }
  return out;
}

GrayImage WarpImage(const GrayImage &image, const AffineTransform &transform,
                    int out_width, int out_height) {
  if (out_width < 1 || out_height < 1) {
    throw ParameterError("warp: bad output size");
  }
  const AffineTransform inverse = InvertAffine(transform);
  GrayImage out;
  out.width = out_width;
  out.height = out_height;
  out.pixels.assign(size_t(out_width) * size_t(out_height), 0.0);
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      const Eigen::Vector2d p =
          inverse.Apply(Eigen::Vector2d(double(x), double(y)));
      out.pixels[size_t(y) * size_t(out_width) + size_t(x)] =
          BilinearSample(image, p(0), p(1));
    }
  }
  return out;
}

Eigen::VectorXd CanonicalLandmarks(int size) {
  if (size < 8) throw ParameterError("canonical: size too small");
  const double s = double(size);
  Eigen::VectorXd shape(10);
  shape << 0.30 * s, 0.35 * s,   // left eye
      0.70 * s, 0.35 * s,        // right eye
      0.50 * s, 0.55 * s,        // nose tip
      0.35 * s, 0.72 * s,        // left mouth corner
      0.65 * s, 0.72 * s;        // right mouth corner
  return shape;
}

GrayImage AlignFace(const GrayImage &image, const Eigen::VectorXd &landmarks,
                    int size) {
  if (landmarks.size() != 10) {
    throw ParameterError("align: expected 5 landmarks");
  }
  const AffineTransform transform =
      EstimateAffine(landmarks, CanonicalLandmarks(size));
  return WarpImage(image, transform, size, size);
}

}  // namespace facevox
