// include/facevox/face_detect.hpp

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

#ifndef FACEVOX_FACE_DETECT_HPP_
#define FACEVOX_FACE_DETECT_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "facevox/image.hpp"

namespace facevox {

// Summed-area table with a zero top row and left column, so sums over
// any axis-aligned rectangle need four lookups.
struct IntegralImage {
  int width = 0;   // of the source image
  int height = 0;
  Eigen::MatrixXd sums;  // (height + 1) x (width + 1)
};

IntegralImage ComputeIntegral(const GrayImage &image);
IntegralImage ComputeSquaredIntegral(const GrayImage &image);

// Sum of pixels in [x, x + w) x [y, y + h).
double RectSum(const IntegralImage &integral, int x, int y, int w, int h);

// Two-rectangle features. A horizontal pair splits the patch into a
// left and a right half, a vertical pair into a top and a bottom half;
// the value is first half minus second half.
enum class HaarKind { kHorizontalPair, kVerticalPair };

struct HaarFeature {
  HaarKind kind = HaarKind::kHorizontalPair;
  int x = 0;  // within the detection window
  int y = 0;
  int width = 0;
  int height = 0;
};

// Raw (unnormalized) feature value for a window anchored at
// (window_x, window_y) in the integral image.
double HaarFeatureValue(const IntegralImage &integral,
                        const HaarFeature &feature, int window_x,
                        int window_y);

// Standard deviation of the window, from plain and squared integrals.
// Near-constant windows report 1 so normalization is a no-op.
double WindowStdDev(const IntegralImage &sums, const IntegralImage &squares,
                    int window_x, int window_y, int window_size);

struct HaarEnumerationOptions {
  int min_size = 4;
  int size_step = 4;
  int position_step = 2;
};

// All two-rectangle features that fit in a square window. Halved
// dimensions must be whole, so horizontal pairs need an even width and
// vertical pairs an even height.
std::vector<HaarFeature> EnumerateHaarFeatures(
    int window_size, const HaarEnumerationOptions &options);

// One thresholded feature: predicts 1 iff polarity * value <
// polarity * threshold.
struct DecisionStump {
  int feature = 0;
  double threshold = 0.0;
  int polarity = 1;
  double weight = 0.0;  // vote strength in the ensemble
};

struct StrongClassifier {
  std::vector<DecisionStump> stumps;
};

int StumpPredict(const DecisionStump &stump, double value);

// Weighted vote margin: sum of votes for 1 minus half the total vote
// mass. Non-negative margins classify as 1.
double StrongMargin(const StrongClassifier &classifier,
                    const Eigen::RowVectorXd &feature_values);
bool StrongClassify(const StrongClassifier &classifier,
                    const Eigen::RowVectorXd &feature_values);

// Boosted stump ensemble over a precomputed feature matrix
// (samples x features), labels in {0, 1}. Initial sample weights are
// split evenly between the classes. Rounds stop early when no stump
// beats chance or when one separates the data exactly.
StrongClassifier TrainAdaBoost(const Eigen::MatrixXd &features,
                               const std::vector<int> &labels, int n_rounds);

struct HaarTrainOptions {
  int window_size = 16;
  int rounds = 10;
  HaarEnumerationOptions enumeration;
};

struct HaarDetector {
  int window_size = 0;
  std::vector<HaarFeature> features;  // referenced by stump indices
  StrongClassifier classifier;
};

// Trains a window classifier on positive and negative crops, all of
// which must be window_size x window_size. Feature values are scaled
// by the window standard deviation before boosting; only the features
// the final ensemble uses are kept.
HaarDetector TrainHaarDetector(const std::vector<GrayImage> &positives,
                               const std::vector<GrayImage> &negatives,
                               const HaarTrainOptions &options);

// Feature vector a detector sees for one crop (variance-normalized).
Eigen::RowVectorXd DetectorFeatureVector(const HaarDetector &detector,
                                         const GrayImage &window);

struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double width = 0.0;
  double height = 0.0;
};

double IntersectionOverUnion(const BoundingBox &a, const BoundingBox &b);

struct Detection {
  BoundingBox box;
  double score = 0.0;  // classifier margin
};

struct ScanOptions {
  double scale_factor = 1.25;  // shrink per pyramid level
  int step = 2;                // window stride, pixels
  double overlap_threshold = 0.3;  // suppress above this IoU
};

// Slides the detector over a pyramid of progressively smaller copies
// of the image, then greedily suppresses overlapping hits, keeping the
// higher-margin box. Boxes are in original image coordinates.
std::vector<Detection> ScanDetect(const GrayImage &image,
                                  const HaarDetector &detector,
                                  const ScanOptions &options);

}  // namespace facevox

#endif  // FACEVOX_FACE_DETECT_HPP_
