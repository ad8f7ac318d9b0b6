// facevox/ivector.hpp

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

#ifndef FACEVOX_IVECTOR_HPP_
#define FACEVOX_IVECTOR_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "facevox/gmm.hpp"

namespace facevox {

// Per-utterance sufficient statistics against a background model:
// zero-order soft counts n(c) and mean-centered first-order sums
// f(c,:) = sum_t p(c|x_t) (x_t - mu_c).
struct BaumWelchStats {
  Eigen::VectorXd n;  // M
  Eigen::MatrixXd f;  // M x K
};

BaumWelchStats AccumulateBaumWelch(const GmmModel &ubm,
                                   const Eigen::MatrixXd &frames);

// Low-rank subspace M = m + T w over mean supervectors.  Supervector
// entries are stacked component-major: index = c * K + k.  sigma holds the
// background model's variances in the same stacking; it stays frozen
// during training.
struct TotalVariabilitySpace {
  Eigen::MatrixXd t;      // (M*K) x R
  Eigen::VectorXd sigma;  // M*K
  int components = 0;
  int dim = 0;
  int rank = 0;
};

struct TvTrainOptions {
  int iterations = 10;
  uint64_t seed = 0;
  // Drop the y y^T term from the M-step accumulator (a printed variant of
  // the update kept behind this switch; the default is the standard one).
  bool literal_accumulator = false;
};

// EM over utterance statistics.  T is initialized i.i.d. uniform on
// [-0.001, 0.001] from the seed.  Per-utterance posterior:
//   L(s)    = I + T' Sigma^-1 N(s) T
//   ybar(s) = L(s)^-1 T' Sigma^-1 f(s)
// M-step per component c:
//   A_c = sum_s n_c(s) (L(s)^-1 + ybar ybar')     C = sum_s f(s) ybar'
//   T_c = C_c A_c^-1   (ridge-stabilized when A_c is singular)
TotalVariabilitySpace TrainTotalVariability(
    const std::vector<BaumWelchStats> &stats, const GmmModel &ubm, int rank,
    const TvTrainOptions &options = {});

// Posterior mean w = (I + T' Sigma^-1 N T)^-1 T' Sigma^-1 f of the latent
// factor for one utterance.  Zero statistics give a zero vector.
Eigen::VectorXd ExtractIvector(const TotalVariabilitySpace &tv,
                               const BaumWelchStats &stats);

}  // namespace facevox

#endif  // FACEVOX_IVECTOR_HPP_
