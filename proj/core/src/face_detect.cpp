// src/face_detect.cpp

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

#include "facevox/face_detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "facevox/error.hpp"

namespace facevox {

namespace {

constexpr double kMinStumpError = 1e-10;
constexpr double kMinWindowStdDev = 1e-12;

void CheckWindowFits(const IntegralImage &integral, int x, int y, int w,
                     int h) {
  if (w < 1 || h < 1 || x < 0 || y < 0 || x + w > integral.width ||
      y + h > integral.height) {
    throw ParameterError("integral: rectangle outside image");
  }
}

}  // namespace

IntegralImage ComputeIntegral(const GrayImage &image) {
  IntegralImage out;
  out.width = image.width;
  out.height = image.height;
  out.sums = Eigen::MatrixXd::Zero(image.height + 1, image.width + 1);
  for (int y = 0; y < image.height; ++y) {
    double row_acc = 0.0;
    for (int x = 0; x < image.width; ++x) {
      row_acc += image.At(x, y);
      out.sums(y + 1, x + 1) = out.sums(y, x + 1) + row_acc;
    }
  }
  return out;
}

IntegralImage ComputeSquaredIntegral(const GrayImage &image) {
  GrayImage squared = image;
  for (double &p : squared.pixels) p *= p;
  return ComputeIntegral(squared);
}

double RectSum(const IntegralImage &integral, int x, int y, int w, int h) {
  CheckWindowFits(integral, x, y, w, h);
  const Eigen::MatrixXd &s = integral.sums;
  return s(y + h, x + w) - s(y, x + w) - s(y + h, x) + s(y, x);
}

double HaarFeatureValue(const IntegralImage &integral,
                        const HaarFeature &feature, int window_x,
                        int window_y) {
  const int x = window_x + feature.x;
  const int y = window_y + feature.y;
  if (feature.kind == HaarKind::kHorizontalPair) {
    const int half = feature.width / 2;
    if (half * 2 != feature.width) {
      throw ParameterError("haar: horizontal pair needs even width");
    }
    return RectSum(integral, x, y, half, feature.height) -
           RectSum(integral, x + half, y, half, feature.height);
  }
  const int half = feature.height / 2;
  if (half * 2 != feature.height) {
    throw ParameterError("haar: vertical pair needs even height");
  }
  return RectSum(integral, x, y, feature.width, half) -
         RectSum(integral, x, y + half, feature.width, half);
}

double WindowStdDev(const IntegralImage &sums, const IntegralImage &squares,
                    int window_x, int window_y, int window_size) {
  const double n = double(window_size) * double(window_size);
  const double s1 = RectSum(sums, window_x, window_y, window_size,
                            window_size);
  const double s2 = RectSum(squares, window_x, window_y, window_size,
                            window_size);
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  if (var < kMinWindowStdDev) return 1.0;
  return std::sqrt(var);
}

std::vector<HaarFeature> EnumerateHaarFeatures(
    int window_size, const HaarEnumerationOptions &options) {
  if (window_size < 2 || options.min_size < 2 || options.size_step < 1 ||
      options.position_step < 1) {
    throw ParameterError("haar: bad enumeration options");
  }
  std::vector<HaarFeature> features;
  for (int h = options.min_size; h <= window_size; h += options.size_step) {
    for (int w = options.min_size; w <= window_size; w += options.size_step) {
      for (int kind_idx = 0; kind_idx < 2; ++kind_idx) {
        const HaarKind kind = kind_idx == 0 ? HaarKind::kHorizontalPair
                                            : HaarKind::kVerticalPair;
        if (kind == HaarKind::kHorizontalPair && w % 2 != 0) continue;
        if (kind == HaarKind::kVerticalPair && h % 2 != 0) continue;
        for (int y = 0; y + h <= window_size; y += options.position_step) {
          for (int x = 0; x + w <= window_size; x += options.position_step) {
            features.push_back(HaarFeature{kind, x, y, w, h});
          }
        }
      }
    }
  }
  if (features.empty()) throw ParameterError("haar: no features fit");
  return features;
}

int StumpPredict(const DecisionStump &stump, double value) {
  return stump.polarity * value < stump.polarity * stump.threshold ? 1 : 0;
}

double StrongMargin(const StrongClassifier &classifier,
                    const Eigen::RowVectorXd &feature_values) {
  double votes = 0.0;
  double total = 0.0;
  for (const DecisionStump &stump : classifier.stumps) {
    if (stump.feature < 0 || stump.feature >= feature_values.size()) {
      throw ParameterError("adaboost: stump feature out of range");
    }
    votes += stump.weight * StumpPredict(stump, feature_values(stump.feature));
    total += stump.weight;
  }
  return votes - 0.5 * total;
}

bool StrongClassify(const StrongClassifier &classifier,
                    const Eigen::RowVectorXd &feature_values) {
  return StrongMargin(classifier, feature_values) >= 0.0;
}

StrongClassifier TrainAdaBoost(const Eigen::MatrixXd &features,
                               const std::vector<int> &labels, int n_rounds) {
  const int n = int(features.rows());
  const int d = int(features.cols());
  if (n < 2 || d < 1) throw InsufficientDataError("adaboost: empty matrix");
  if (int(labels.size()) != n) {
    throw ParameterError("adaboost: label count mismatch");
  }
  if (n_rounds < 1) throw ParameterError("adaboost: rounds must be >= 1");
  int n_pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw ParameterError("adaboost: labels must be 0/1");
    n_pos += y;
  }
  const int n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw InsufficientDataError("adaboost: need both classes");
  }

  // Values are sorted per feature once; weighted errors are rescanned
  // against that fixed order each round.
  std::vector<std::vector<int>> order(static_cast<size_t>(d));
  for (int j = 0; j < d; ++j) {
    order[size_t(j)].resize(size_t(n));
    std::iota(order[size_t(j)].begin(), order[size_t(j)].end(), 0);
    std::sort(order[size_t(j)].begin(), order[size_t(j)].end(),
              [&](int a, int b) { return features(a, j) < features(b, j); });
  }

  Eigen::VectorXd weights(n);
  for (int i = 0; i < n; ++i) {
    weights(i) = labels[size_t(i)] == 1 ? 0.5 / n_pos : 0.5 / n_neg;
  }

  StrongClassifier strong;
  for (int round = 0; round < n_rounds; ++round) {
    weights /= weights.sum();
    double total_pos = 0.0;
    for (int i = 0; i < n; ++i) {
      if (labels[size_t(i)] == 1) total_pos += weights(i);
    }
    const double total_neg = 1.0 - total_pos;

    DecisionStump best;
    double best_error = std::numeric_limits<double>::infinity();
    for (int j = 0; j < d; ++j) {
      const std::vector<int> &idx = order[size_t(j)];
      double below_pos = 0.0;
      double below_neg = 0.0;
      for (int cut = 0; cut <= n; ++cut) {
        double threshold;
        if (cut == 0) {
          threshold = -std::numeric_limits<double>::infinity();
        } else if (cut == n) {
          threshold = std::numeric_limits<double>::infinity();
        } else {
          const double lo = features(idx[size_t(cut - 1)], j);
          const double hi = features(idx[size_t(cut)], j);
          if (lo == hi) {
            const int i = idx[size_t(cut)];
            if (labels[size_t(i)] == 1) below_pos += weights(i);
            else below_neg += weights(i);
            continue;
          }
          threshold = 0.5 * (lo + hi);
        }
        // polarity +1 predicts 1 below the threshold.
        const double err_plus = below_neg + (total_pos - below_pos);
        const double err_minus = below_pos + (total_neg - below_neg);
        if (err_plus < best_error) {
          best_error = err_plus;
          best = DecisionStump{j, threshold, 1, 0.0};
        }
        if (err_minus < best_error) {
          best_error = err_minus;
          best = DecisionStump{j, threshold, -1, 0.0};
        }
        if (cut < n) {
          const int i = idx[size_t(cut)];
          if (labels[size_t(i)] == 1) below_pos += weights(i);
          else below_neg += weights(i);
        }
      }
    }

    if (best_error >= 0.5) break;
    const double floored = std::max(best_error, kMinStumpError);
    const double beta = floored / (1.0 - floored);
    best.weight = std::log(1.0 / beta);
    strong.stumps.push_back(best);
    if (best_error <= 0.0) break;
    for (int i = 0; i < n; ++i) {
      const int predicted = StumpPredict(best, features(i, best.feature));
      if (predicted == labels[size_t(i)]) weights(i) *= beta;
    }
  }
  if (strong.stumps.empty()) {
    throw InsufficientDataError("adaboost: no stump beat chance");
  }
  return strong;
}

namespace {

Eigen::RowVectorXd NormalizedFeatureRow(
    const std::vector<HaarFeature> &features, const GrayImage &window) {
  const IntegralImage sums = ComputeIntegral(window);
  const IntegralImage squares = ComputeSquaredIntegral(window);
  const double sigma = WindowStdDev(sums, squares, 0, 0, window.width);
  Eigen::RowVectorXd row(int(features.size()));
  for (size_t j = 0; j < features.size(); ++j) {
    row(int(j)) = HaarFeatureValue(sums, features[j], 0, 0) / sigma;
  }
  return row;
}

}  // namespace

HaarDetector TrainHaarDetector(const std::vector<GrayImage> &positives,
                               const std::vector<GrayImage> &negatives,
                               const HaarTrainOptions &options) {
  if (positives.empty() || negatives.empty()) {
    throw InsufficientDataError("detector: need both positive and negative "
                                "crops");
  }
  const int w = options.window_size;
  for (const auto *set : {&positives, &negatives}) {
    for (const GrayImage &img : *set) {
      if (img.width != w || img.height != w) {
        throw ParameterError("detector: crop size does not match window");
      }
    }
  }
  const std::vector<HaarFeature> all =
      EnumerateHaarFeatures(w, options.enumeration);

  const int n = int(positives.size() + negatives.size());
  Eigen::MatrixXd matrix(n, int(all.size()));
  std::vector<int> labels(static_cast<size_t>(n));
  int row = 0;
  for (const GrayImage &img : positives) {
    matrix.row(row) = NormalizedFeatureRow(all, img);
    labels[size_t(row)] = 1;
    ++row;
  }
  for (const GrayImage &img : negatives) {
    matrix.row(row) = NormalizedFeatureRow(all, img);
    labels[size_t(row)] = 0;
    ++row;
  }

  StrongClassifier strong = TrainAdaBoost(matrix, labels, options.rounds);

  // Keep only the features the ensemble actually consults.
  HaarDetector detector;
  detector.window_size = w;
  std::unordered_map<int, int> remap;
  for (DecisionStump &stump : strong.stumps) {
    auto it = remap.find(stump.feature);
    if (it == remap.end()) {
      it = remap.emplace(stump.feature, int(detector.features.size())).first;
      detector.features.push_back(all[size_t(stump.feature)]);
    }
    stump.feature = it->second;
  }
  detector.classifier = std::move(strong);
  return detector;
}

Eigen::RowVectorXd DetectorFeatureVector(const HaarDetector &detector,
                                         const GrayImage &window) {
  if (window.width != detector.window_size ||
      window.height != detector.window_size) {
    throw ParameterError("detector: crop size does not match window");
  }
  return NormalizedFeatureRow(detector.features, window);
}

double IntersectionOverUnion(const BoundingBox &a, const BoundingBox &b) {
  const double ix = std::max(
      0.0, std::min(a.x + a.width, b.x + b.width) - std::max(a.x, b.x));
  const double iy = std::max(
      0.0, std::min(a.y + a.height, b.y + b.height) - std::max(a.y, b.y));
  const double intersection = ix * iy;
  const double union_area =
      a.width * a.height + b.width * b.height - intersection;
  if (union_area <= 0.0) return 0.0;
  return intersection / union_area;
}

std::vector<Detection> ScanDetect(const GrayImage &image,
                                  const HaarDetector &detector,
                                  const ScanOptions &options) {
  if (detector.window_size < 2 || detector.features.empty()) {
    throw ParameterError("scan: detector is not trained");
  }
  if (options.scale_factor <= 1.0 || options.step < 1) {
    throw ParameterError("scan: bad options");
  }
  const int w = detector.window_size;

  std::vector<Detection> raw;
  double scale = 1.0;
  while (true) {
    const int level_w = int(std::lround(image.width / scale));
    const int level_h = int(std::lround(image.height / scale));
    if (level_w < w || level_h < w) break;
    const GrayImage level = scale == 1.0
                                ? image
                                : ResizeBilinear(image, level_w, level_h);
    const IntegralImage sums = ComputeIntegral(level);
    const IntegralImage squares = ComputeSquaredIntegral(level);
    const double rx = double(image.width) / level.width;
    const double ry = double(image.height) / level.height;
    Eigen::RowVectorXd values(int(detector.features.size()));
    for (int y = 0; y + w <= level.height; y += options.step) {
      for (int x = 0; x + w <= level.width; x += options.step) {
        const double sigma = WindowStdDev(sums, squares, x, y, w);
        for (size_t j = 0; j < detector.features.size(); ++j) {
          values(int(j)) =
              HaarFeatureValue(sums, detector.features[j], x, y) / sigma;
        }
        const double margin = StrongMargin(detector.classifier, values);
        if (margin >= 0.0) {
          raw.push_back(Detection{
              BoundingBox{x * rx, y * ry, w * rx, w * ry}, margin});
        }
      }
    }
    scale *= options.scale_factor;
  }

  std::sort(raw.begin(), raw.end(), [](const Detection &a, const Detection &b) {
    return a.score > b.score;
  });
  std::vector<Detection> kept;
  for (const Detection &candidate : raw) {
    bool suppressed = false;
    for (const Detection &winner : kept) {
      if (IntersectionOverUnion(candidate.box, winner.box) >
          options.overlap_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(candidate);
  }
  return kept;
}

}  // namespace facevox
