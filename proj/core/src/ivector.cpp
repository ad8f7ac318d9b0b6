// src/ivector.cpp

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

#include "facevox/ivector.hpp"

#include <cmath>

#include "facevox/error.hpp"
#include "facevox/rng.hpp"

namespace facevox {

namespace {

// Stacks an M x K per-component matrix into an (M*K) supervector,
// component-major.
Eigen::VectorXd Stack(const Eigen::MatrixXd &per_component) {
  Eigen::VectorXd out(per_component.rows() * per_component.cols());
  for (int c = 0; c < per_component.rows(); ++c) {
    out.segment(c * per_component.cols(), per_component.cols()) =
        per_component.row(c);
  }
  return out;
}

// Posterior precision L = I + T' Sigma^-1 N T, exploiting the block
// structure: only component sub-blocks of T enter, each scaled by n(c).
Eigen::MatrixXd PosteriorPrecision(const TotalVariabilitySpace &tv,
                                   const BaumWelchStats &stats) {
  const int r = tv.rank;
  const int k = tv.dim;
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(r, r);
  for (int c = 0; c < tv.components; ++c) {
    if (stats.n(c) == 0.0) continue;
    const auto t_c = tv.t.middleRows(c * k, k);
    const auto inv_var =
        tv.sigma.segment(c * k, k).array().inverse().matrix().asDiagonal();
    l.noalias() += stats.n(c) * t_c.transpose() * inv_var * t_c;
  }
  return l;
}

Eigen::VectorXd Project(const TotalVariabilitySpace &tv,
                        const BaumWelchStats &stats) {
  // T' Sigma^-1 f with f stacked component-major.
  const Eigen::VectorXd f = Stack(stats.f);
  return tv.t.transpose() * (f.array() / tv.sigma.array()).matrix();
}

void CheckStats(const TotalVariabilitySpace &tv, const BaumWelchStats &stats) {
  if (int(stats.n.size()) != tv.components ||
      int(stats.f.rows()) != tv.components || int(stats.f.cols()) != tv.dim) {
    throw ParameterError("ivector: statistics shape does not match subspace");
  }
}

}  // namespace

BaumWelchStats AccumulateBaumWelch(const GmmModel &ubm,
                                   const Eigen::MatrixXd &frames) {
  const int m = ubm.NumComponents();
  const int k = ubm.Dim();
  if (frames.cols() != 0 && int(frames.cols()) != k) {
    throw ParameterError("ivector: frame dim does not match background model");
  }
  BaumWelchStats stats;
  stats.n = Eigen::VectorXd::Zero(m);
  stats.f = Eigen::MatrixXd::Zero(m, k);
  for (int t = 0; t < frames.rows(); ++t) {
    const Eigen::VectorXd x = frames.row(t);
    const Eigen::VectorXd post = ComponentPosteriors(ubm, x);
    stats.n += post;
    for (int c = 0; c < m; ++c) {
      stats.f.row(c) += post(c) * (x.transpose() - ubm.means.row(c));
    }
  }
  return stats;
}

TotalVariabilitySpace TrainTotalVariability(
    const std::vector<BaumWelchStats> &stats, const GmmModel &ubm, int rank,
    const TvTrainOptions &options) {
  const int m = ubm.NumComponents();
  const int k = ubm.Dim();
  const int d = m * k;
  if (rank < 1) throw ParameterError("ivector: rank must be >= 1");
  if (rank > d) {
    throw ParameterError("ivector: rank exceeds supervector dimension");
  }
  if (stats.empty()) {
    throw InsufficientDataError("ivector: no utterance statistics");
  }

  TotalVariabilitySpace tv;
  tv.components = m;
  tv.dim = k;
  tv.rank = rank;
  tv.sigma = Stack(ubm.variances);
  for (const BaumWelchStats &s : stats) CheckStats(tv, s);

  Rng rng(options.seed);
  tv.t.resize(d, rank);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < rank; ++j) tv.t(i, j) = rng.Uniform(-0.001, 0.001);
  }

  const int n_utts = int(stats.size());
  for (int it = 0; it < options.iterations; ++it) {
    std::vector<Eigen::MatrixXd> a(size_t(m),
                                   Eigen::MatrixXd::Zero(rank, rank));
    Eigen::MatrixXd c_acc = Eigen::MatrixXd::Zero(d, rank);

    for (int s = 0; s < n_utts; ++s) {
      const Eigen::MatrixXd l = PosteriorPrecision(tv, stats[size_t(s)]);
      const Eigen::LDLT<Eigen::MatrixXd> solver(l);
      const Eigen::MatrixXd l_inv =
          solver.solve(Eigen::MatrixXd::Identity(rank, rank));
      const Eigen::VectorXd y = solver.solve(Project(tv, stats[size_t(s)]));

      Eigen::MatrixXd second = l_inv;
      if (!options.literal_accumulator) second += y * y.transpose();
      for (int c = 0; c < m; ++c) {
        a[size_t(c)].noalias() += stats[size_t(s)].n(c) * second;
      }
      c_acc.noalias() += Stack(stats[size_t(s)].f) * y.transpose();
    }

    for (int c = 0; c < m; ++c) {
      Eigen::MatrixXd &a_c = a[size_t(c)];
      // Ridge keeps the per-component solve well-posed when a component
      // never received soft counts.
      const double ridge = 1e-10 * (a_c.trace() / rank) + 1e-30;
      a_c.diagonal().array() += ridge;
      const Eigen::LDLT<Eigen::MatrixXd> solver(a_c);
      // T_c = C_c A_c^-1, solved row block by row block.
      const Eigen::MatrixXd c_block = c_acc.middleRows(c * k, k);
      tv.t.middleRows(c * k, k) = solver.solve(c_block.transpose()).transpose();
    }
    if (!tv.t.allFinite()) {
      throw SingularityError("ivector: subspace diverged during training");
    }
  }
  return tv;
}

Eigen::VectorXd ExtractIvector(const TotalVariabilitySpace &tv,
                               const BaumWelchStats &stats) {
  CheckStats(tv, stats);
  const Eigen::MatrixXd l = PosteriorPrecision(tv, stats);
  const Eigen::LDLT<Eigen::MatrixXd> solver(l);
  const Eigen::VectorXd w = solver.solve(Project(tv, stats));
  if (!w.allFinite()) {
    throw SingularityError("ivector: extraction produced non-finite values");
  }
  return w;
}

}  // namespace facevox
