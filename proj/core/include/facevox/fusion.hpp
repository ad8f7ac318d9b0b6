// include/facevox/fusion.hpp

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

#ifndef FACEVOX_FUSION_HPP_
#define FACEVOX_FUSION_HPP_

#include <vector>

#include <Eigen/Dense>

namespace facevox {

struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;   // n_components x dim, orthonormal rows
  Eigen::VectorXd eigenvalues;  // descending, zero past the data rank
};

// Principal axes of mean-centered data (rows are samples). Components
// are ordered by decreasing variance; each is signed so its first
// nonzero coordinate is positive. When more components are requested
// than the data rank supports, the basis is completed with
// Gram-Schmidt-orthogonalized standard basis vectors.
PcaModel PcaFit(const Eigen::MatrixXd &data, int n_components);

Eigen::MatrixXd PcaTransform(const PcaModel &model,
                             const Eigen::MatrixXd &data);
Eigen::VectorXd PcaTransform(const PcaModel &model, const Eigen::VectorXd &x);

// Feature-level fusion: the two vectors back to back.
Eigen::VectorXd SerialFuse(const Eigen::VectorXd &a, const Eigen::VectorXd &b);

// Cosine of the angle between two vectors. Zero-length inputs raise
// SingularityError.
double CosineScore(const Eigen::VectorXd &a, const Eigen::VectorXd &b);

// Rescales scores to [0, 1]. Needs at least two scores and a nonzero
// range.
std::vector<double> MinMaxNormalize(const std::vector<double> &scores);

// Linear resampling of a frame sequence (rows are frames) onto a fixed
// frame count, then row-major flattening; turns variable-length
// utterances into fixed-size vectors.
Eigen::MatrixXd ResampleFrames(const Eigen::MatrixXd &frames, int n_frames);
Eigen::VectorXd FlattenFrames(const Eigen::MatrixXd &frames);

struct Trial {
  double score = 0.0;
  bool target = false;  // true when both sides share an identity
};

struct RocPoint {
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
};

// Operating points at every distinct score plus a reject-all sentinel,
// ordered by descending threshold; trials are accepted when score >=
// threshold. Requires at least one target and one nontarget trial.
std::vector<RocPoint> ComputeRoc(const std::vector<Trial> &trials);

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;  // threshold at or bracketing the crossing
  bool exact = false;      // true when a point sits on tpr = 1 - fpr
};

// Rate where false accepts equal false rejects, linearly interpolated
// between adjacent operating points when no point hits it exactly.
EerResult ComputeEer(const std::vector<RocPoint> &roc);

EerResult TrialsEer(const std::vector<Trial> &trials);

}  // namespace facevox

#endif  // FACEVOX_FUSION_HPP_
