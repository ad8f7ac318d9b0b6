// src/gmm.cpp

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

#include "facevox/gmm.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "facevox/error.hpp"
#include "facevox/rng.hpp"

namespace facevox {

namespace {

constexpr double kEmptyComponentCount = 1e-6;
constexpr double kVarianceFloorScale = 1e-4;
constexpr double kAbsoluteVarianceFloor = 1e-10;

double LogSumExp(const Eigen::VectorXd &v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

void CheckDims(const GmmModel &gmm, const Eigen::VectorXd &x) {
  if (x.size() != gmm.Dim()) {
    throw ParameterError("gmm: feature dim " + std::to_string(x.size()) +
                         " does not match model dim " +
                         std::to_string(gmm.Dim()));
  }
}

Eigen::VectorXd GlobalVarianceFloor(const Eigen::MatrixXd &data) {
  const Eigen::RowVectorXd mean = data.colwise().mean();
  Eigen::VectorXd var(data.cols());
  for (int k = 0; k < data.cols(); ++k) {
    var(k) = (data.col(k).array() - mean(k)).square().mean();
  }
  return var;
}

}  // namespace

Eigen::VectorXd GmmComponentLogJoint(const GmmModel &gmm,
                                     const Eigen::VectorXd &x) {
  CheckDims(gmm, x);
  const int m = gmm.NumComponents();
  const double c = -0.5 * gmm.Dim() * std::log(2.0 * std::numbers::pi);
  Eigen::VectorXd out(m);
  for (int i = 0; i < m; ++i) {
    const auto var = gmm.variances.row(i).array();
    const auto diff = x.transpose().array() - gmm.means.row(i).array();
    out(i) = std::log(gmm.weights(i)) + c - 0.5 * var.log().sum() -
             0.5 * (diff.square() / var).sum();
  }
  return out;
}

double GmmLogDensity(const GmmModel &gmm, const Eigen::VectorXd &x) {
  return LogSumExp(GmmComponentLogJoint(gmm, x));
}

Eigen::VectorXd ComponentPosteriors(const GmmModel &gmm,
                                    const Eigen::VectorXd &x) {
  const Eigen::VectorXd lj = GmmComponentLogJoint(gmm, x);
  const double lse = LogSumExp(lj);
  return (lj.array() - lse).exp().matrix();
}

GmmModel TrainGmmEm(const Eigen::MatrixXd &data, int n_components,
                    int iterations, uint64_t seed, EmTrace *trace) {
  const int f = int(data.rows());
  const int k = int(data.cols());
  if (n_components < 1) throw ParameterError("em: need >= 1 component");
  if (iterations < 0) throw ParameterError("em: negative iteration count");
  if (f < n_components || f < 2) {
    throw InsufficientDataError("em: " + std::to_string(f) +
                                " frames cannot support " +
                                std::to_string(n_components) + " components");
  }

  const Eigen::VectorXd global_var = GlobalVarianceFloor(data);
  const Eigen::VectorXd floor =
      global_var.array()
          .unaryExpr([](double v) {
            return std::max(kVarianceFloorScale * v, kAbsoluteVarianceFloor);
          })
          .matrix();

  // Seeded init: distinct random frames as means, global variance, uniform
  // weights.
  Rng rng(seed);
  const std::vector<int> perm = rng.Permutation(f);
  GmmModel gmm;
  gmm.weights = Eigen::VectorXd::Constant(n_components, 1.0 / n_components);
  gmm.means.resize(n_components, k);
  gmm.variances.resize(n_components, k);
  const Eigen::RowVectorXd init_var =
      global_var.array().max(floor.array()).matrix().transpose();
  for (int i = 0; i < n_components; ++i) {
    gmm.means.row(i) = data.row(perm[size_t(i)]);
    gmm.variances.row(i) = init_var;
  }

  if (trace) trace->log_likelihood.clear();

  Eigen::VectorXd counts(n_components);
  Eigen::MatrixXd s1(n_components, k), s2(n_components, k);
  Eigen::VectorXd frame_ll(f);

  auto e_step = [&]() {
    counts.setZero();
    s1.setZero();
    s2.setZero();
    double total = 0.0;
    for (int t = 0; t < f; ++t) {
      const Eigen::VectorXd x = data.row(t);
      const Eigen::VectorXd lj = GmmComponentLogJoint(gmm, x);
      const double lse = LogSumExp(lj);
      frame_ll(t) = lse;
      total += lse;
      const Eigen::VectorXd post = (lj.array() - lse).exp().matrix();
      counts += post;
      s1 += post * x.transpose();
      s2 += post * x.array().square().matrix().transpose();
    }
    return total;
  };

  for (int it = 0; it < iterations; ++it) {
    const double ll = e_step();
    if (trace) trace->log_likelihood.push_back(ll);

    int worst_frame;
    frame_ll.minCoeff(&worst_frame);
    for (int i = 0; i < n_components; ++i) {
      if (counts(i) < kEmptyComponentCount) {
        gmm.means.row(i) = data.row(worst_frame);
        gmm.variances.row(i) = init_var;
        gmm.weights(i) = 1.0 / f;
        continue;
      }
      gmm.weights(i) = counts(i) / f;
      gmm.means.row(i) = s1.row(i) / counts(i);
      gmm.variances.row(i) = (s2.row(i).array() / counts(i) -
                              gmm.means.row(i).array().square())
                                 .max(floor.transpose().array())
                                 .matrix();
    }
    gmm.weights /= gmm.weights.sum();
  }

  if (trace) trace->log_likelihood.push_back(e_step());
  return gmm;
}

GmmModel MapAdapt(const GmmModel &ubm, const Eigen::MatrixXd &data,
                  const MapAdaptationConfig &config) {
  if (config.relevance <= 0.0) {
    throw ParameterError("map: relevance factor must be > 0");
  }
  GmmModel out = ubm;
  const int f = int(data.rows());
  if (f == 0) return out;
  if (int(data.cols()) != ubm.Dim()) {
    throw ParameterError("map: data dim does not match model");
  }

  const int m = ubm.NumComponents();
  const int k = ubm.Dim();
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(m, k);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(m, k);
  for (int t = 0; t < f; ++t) {
    const Eigen::VectorXd x = data.row(t);
    const Eigen::VectorXd post = ComponentPosteriors(ubm, x);
    counts += post;
    s1 += post * x.transpose();
    s2 += post * x.array().square().matrix().transpose();
  }

  for (int i = 0; i < m; ++i) {
    const double n = counts(i);
    const double a = n / (n + config.relevance);
    Eigen::RowVectorXd ex = Eigen::RowVectorXd::Zero(k);
    Eigen::RowVectorXd ex2 = Eigen::RowVectorXd::Zero(k);
    if (n > 0.0) {
      ex = s1.row(i) / n;
      ex2 = s2.row(i) / n;
    }
    if (config.adapt_weights) {
      out.weights(i) = a * n / f + (1.0 - a) * ubm.weights(i);
    }
    const Eigen::RowVectorXd new_mean =
        config.adapt_means ? (a * ex + (1.0 - a) * ubm.means.row(i)).eval()
                           : ubm.means.row(i).eval();
    if (config.adapt_variances) {
      const Eigen::ArrayXXd second_moment =
          a * ex2.array() +
          (1.0 - a) *
              (ubm.variances.row(i).array() + ubm.means.row(i).array().square());
      const Eigen::ArrayXXd floor =
          (kVarianceFloorScale * ubm.variances.row(i).array())
              .max(kAbsoluteVarianceFloor);
      out.variances.row(i) =
          (second_moment - new_mean.array().square()).max(floor).matrix();
    }
    if (config.adapt_means) out.means.row(i) = new_mean;
  }
  if (config.adapt_weights) out.weights /= out.weights.sum();
  return out;
}

double AverageLogLikelihoodRatio(const Eigen::MatrixXd &frames,
                                 const GmmModel &target, const GmmModel &ubm) {
  if (frames.rows() == 0) {
    throw InsufficientDataError("llr: no frames to score");
  }
  double acc = 0.0;
  for (int t = 0; t < frames.rows(); ++t) {
    const Eigen::VectorXd x = frames.row(t);
    acc += GmmLogDensity(target, x) - GmmLogDensity(ubm, x);
  }
  return acc / double(frames.rows());
}

}  // namespace facevox
