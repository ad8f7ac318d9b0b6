// src/fusion.cpp

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

#include "facevox/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "facevox/error.hpp"

namespace facevox {

namespace {

constexpr double kCoordinateTol = 1e-12;

// Flips each row so its first nonzero coordinate is positive.
void FixComponentSigns(Eigen::MatrixXd &components) {
  for (int i = 0; i < components.rows(); ++i) {
    for (int j = 0; j < components.cols(); ++j) {
      const double v = components(i, j);
      if (std::abs(v) > kCoordinateTol) {
        if (v < 0.0) components.row(i) = -components.row(i);
        break;
      }
    }
  }
}

}  // namespace

PcaModel PcaFit(const Eigen::MatrixXd &data, int n_components) {
  const int n = int(data.rows());
  const int dim = int(data.cols());
  if (n < 2) throw InsufficientDataError("pca: need at least 2 samples");
  if (n_components < 1 || n_components > dim) {
    throw ParameterError("pca: component count out of range");
  }

  PcaModel model;
  model.mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - model.mean.transpose();
  const double denom = double(n - 1);

  Eigen::MatrixXd axes;          // dim x n_axes, columns unit length
  Eigen::VectorXd variances;     // matching eigenvalues
  if (n - 1 < dim) {
    // Small-sample route: eigenvectors of the sample Gram matrix lift
    // to covariance eigenvectors with the same eigenvalues.
    const Eigen::MatrixXd gram = centered * centered.transpose() / denom;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    const int rank_cap = n - 1;
    axes.resize(dim, rank_cap);
    variances.resize(rank_cap);
    for (int i = 0; i < rank_cap; ++i) {
      const int src = n - 1 - i;  // ascending order from the solver
      const double value = std::max(solver.eigenvalues()(src), 0.0);
      Eigen::VectorXd lifted =
          centered.transpose() * solver.eigenvectors().col(src);
      const double norm = lifted.norm();
      if (norm > kCoordinateTol) lifted /= norm;
      else lifted.setZero();
      axes.col(i) = lifted;
      variances(i) = value;
    }
  } else {
    const Eigen::MatrixXd covariance =
        centered.transpose() * centered / denom;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
    axes.resize(dim, dim);
    variances.resize(dim);
    for (int i = 0; i < dim; ++i) {
      const int src = dim - 1 - i;
      axes.col(i) = solver.eigenvectors().col(src);
      variances(i) = std::max(solver.eigenvalues()(src), 0.0);
    }
  }

  model.components.resize(n_components, dim);
  model.eigenvalues = Eigen::VectorXd::Zero(n_components);
  int filled = 0;
  for (int i = 0; i < axes.cols() && filled < n_components; ++i) {
    if (axes.col(i).norm() <= kCoordinateTol) continue;
    model.components.row(filled) = axes.col(i).transpose();
    model.eigenvalues(filled) = variances(i);
    ++filled;
  }
  // Deterministic completion past the data rank: orthogonalized
  // standard basis vectors.
  for (int e = 0; e < dim && filled < n_components; ++e) {
    Eigen::VectorXd candidate = Eigen::VectorXd::Zero(dim);
    candidate(e) = 1.0;
    for (int i = 0; i < filled; ++i) {
      candidate -= model.components.row(i).dot(candidate) *
                   model.components.row(i).transpose();
    }
    const double norm = candidate.norm();
    if (norm > 1e-8) {
      model.components.row(filled) = candidate.transpose() / norm;
      ++filled;
    }
  }
  if (filled < n_components) {
    throw SingularityError("pca: could not complete the basis");
  }
  FixComponentSigns(model.components);
  return model;
}

Eigen::MatrixXd PcaTransform(const PcaModel &model,
                             const Eigen::MatrixXd &data) {
  if (data.cols() != model.mean.size()) {
    throw ParameterError("pca: dimension mismatch");
  }
  return (data.rowwise() - model.mean.transpose()) *
         model.components.transpose();
}

Eigen::VectorXd PcaTransform(const PcaModel &model, const Eigen::VectorXd &x) {
  if (x.size() != model.mean.size()) {
    throw ParameterError("pca: dimension mismatch");
  }
  return model.components * (x - model.mean);
}

Eigen::VectorXd SerialFuse(const Eigen::VectorXd &a,
                           const Eigen::VectorXd &b) {
  Eigen::VectorXd fused(a.size() + b.size());
  fused.head(a.size()) = a;
  fused.tail(b.size()) = b;
  return fused;
}

double CosineScore(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
  if (a.size() != b.size()) throw ParameterError("cosine: size mismatch");
  const double na = a.norm();
  const double nb = b.norm();
  if (na <= 0.0 || nb <= 0.0) {
    throw SingularityError("cosine: zero-length vector");
  }
  return a.dot(b) / (na * nb);
}

std::vector<double> MinMaxNormalize(const std::vector<double> &scores) {
  if (scores.size() < 2) {
    throw InsufficientDataError("normalize: need at least 2 scores");
  }
  const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (hi <= lo) throw SingularityError("normalize: degenerate score range");
  std::vector<double> out(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    out[i] = (scores[i] - lo) / (hi - lo);
  }
  return out;
}

Eigen::MatrixXd ResampleFrames(const Eigen::MatrixXd &frames, int n_frames) {
  if (frames.rows() < 1) throw InsufficientDataError("resample: no frames");
  if (n_frames < 1) throw ParameterError("resample: bad frame count");
  Eigen::MatrixXd out(n_frames, frames.cols());
  if (frames.rows() == 1 || n_frames == 1) {
    for (int t = 0; t < n_frames; ++t) out.row(t) = frames.row(0);
    return out;
  }
  const double step = double(frames.rows() - 1) / double(n_frames - 1);
  for (int t = 0; t < n_frames; ++t) {
    const double position = t * step;
    const int lo = std::min(int(std::floor(position)),
                            int(frames.rows()) - 1);
    const int hi = std::min(lo + 1, int(frames.rows()) - 1);
    const double frac = position - lo;
    out.row(t) = (1.0 - frac) * frames.row(lo) + frac * frames.row(hi);
  }
  return out;
}

Eigen::VectorXd FlattenFrames(const Eigen::MatrixXd &frames) {
  Eigen::VectorXd flat(frames.size());
  int pos = 0;
  for (int t = 0; t < frames.rows(); ++t) {
    flat.segment(pos, frames.cols()) = frames.row(t);
    pos += int(frames.cols());
  }
  return flat;
}

std::vector<RocPoint> ComputeRoc(const std::vector<Trial> &trials) {
  int n_target = 0;
  int n_nontarget = 0;
  for (const Trial &trial : trials) {
    if (trial.target) ++n_target;
    else ++n_nontarget;
  }
  if (n_target == 0 || n_nontarget == 0) {
    throw InsufficientDataError("roc: need both trial kinds");
  }

  std::vector<Trial> sorted = trials;
  std::sort(sorted.begin(), sorted.end(),
            [](const Trial &a, const Trial &b) { return a.score > b.score; });

  std::vector<RocPoint> roc;
  roc.push_back(RocPoint{sorted.front().score + 1.0, 0.0, 0.0});
  int accepted_target = 0;
  int accepted_nontarget = 0;
  size_t i = 0;
  while (i < sorted.size()) {
    const double threshold = sorted[i].score;
    while (i < sorted.size() && sorted[i].score == threshold) {
      if (sorted[i].target) ++accepted_target;
      else ++accepted_nontarget;
      ++i;
    }
    roc.push_back(RocPoint{threshold,
                           double(accepted_target) / n_target,
                           double(accepted_nontarget) / n_nontarget});
  }
  return roc;
}

EerResult ComputeEer(const std::vector<RocPoint> &roc) {
  if (roc.size() < 2) throw InsufficientDataError("eer: curve too short");
  EerResult result;
  double prev_diff = roc.front().fpr - (1.0 - roc.front().tpr);
  for (size_t i = 0; i < roc.size(); ++i) {
    const double diff = roc[i].fpr - (1.0 - roc[i].tpr);
    // Rates are integer-count ratios; a true crossing can still be off by
    // one rounding step, so exactness gets a tiny window.
    if (std::abs(diff) <= 1e-12) {
      result.eer = roc[i].fpr;
      result.threshold = roc[i].threshold;
      result.exact = true;
      return result;
    }
    if (diff > 0.0) {
      if (i == 0) break;
      const double t = -prev_diff / (diff - prev_diff);
      result.eer = roc[i - 1].fpr + t * (roc[i].fpr - roc[i - 1].fpr);
      result.threshold = roc[i].threshold;
      result.exact = false;
      return result;
    }
    prev_diff = diff;
  }
  // The curve never crosses; report its closest endpoint.
  result.eer = roc.back().fpr;
  result.threshold = roc.back().threshold;
  result.exact = false;
  return result;
}

EerResult TrialsEer(const std::vector<Trial> &trials) {
  return ComputeEer(ComputeRoc(trials));
}

}  // namespace facevox
