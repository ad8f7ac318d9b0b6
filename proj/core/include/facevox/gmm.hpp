// facevox/gmm.hpp

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

#ifndef FACEVOX_GMM_HPP_
#define FACEVOX_GMM_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace facevox {

// Diagonal-covariance Gaussian mixture.  weights sum to 1; variances are
// kept above a strictly positive floor by every trainer in this library.
struct GmmModel {
  Eigen::VectorXd weights;    // M
  Eigen::MatrixXd means;      // M x K
  Eigen::MatrixXd variances;  // M x K

  int NumComponents() const { return int(weights.size()); }
  int Dim() const { return int(means.cols()); }
};

// Per-component log joint log(w_i) + log N(x; mu_i, Sigma_i).
Eigen::VectorXd GmmComponentLogJoint(const GmmModel &gmm,
                                     const Eigen::VectorXd &x);

// log p(x) via log-sum-exp over components; immune to underflow.
double GmmLogDensity(const GmmModel &gmm, const Eigen::VectorXd &x);

// Posterior responsibilities p(i | x); a probability vector.
Eigen::VectorXd ComponentPosteriors(const GmmModel &gmm,
                                    const Eigen::VectorXd &x);

// Per-iteration total log-likelihood of the training data, evaluated under
// the parameters entering each iteration, plus one final evaluation.
struct EmTrace {
  std::vector<double> log_likelihood;
};

// Maximum-likelihood EM training with seeded initialization: means are
// drawn from distinct data frames, variances start at the global per-dim
// variance, weights uniform.  Components whose soft count falls below 1e-6
// are re-seeded at the lowest-likelihood frame.  Variances are floored at
// 1e-4 x the global variance of each dimension.
GmmModel TrainGmmEm(const Eigen::MatrixXd &data, int n_components,
                    int iterations, uint64_t seed, EmTrace *trace = nullptr);

// Relevance-MAP adaptation of a universal background model towards
// enrollment data.  Each statistic uses the data-dependent coefficient
// a_i = n_i / (n_i + relevance); adapted weights are renormalized to sum
// to 1.  Empty data returns the background model unchanged.
struct MapAdaptationConfig {
  double relevance = 16.0;
  bool adapt_weights = true;
  bool adapt_means = true;
  bool adapt_variances = true;
};

GmmModel MapAdapt(const GmmModel &ubm, const Eigen::MatrixXd &data,
                  const MapAdaptationConfig &config = {});

// Frame-averaged log-likelihood ratio of a feature matrix under a target
// model versus the background model.
double AverageLogLikelihoodRatio(const Eigen::MatrixXd &frames,
                                 const GmmModel &target, const GmmModel &ubm);

}  // namespace facevox

#endif  // FACEVOX_GMM_HPP_
