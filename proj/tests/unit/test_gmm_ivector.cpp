// tests/unit/test_gmm_ivector.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "facevox/error.hpp"
#include "facevox/gmm.hpp"
#include "facevox/ivector.hpp"
#include "facevox/rng.hpp"

using namespace facevox;

namespace {

GmmModel RandomGmm(int components, int dim, uint64_t seed) {
  Rng rng(seed);
  GmmModel gmm;
  gmm.weights = Eigen::VectorXd(components);
  gmm.means = Eigen::MatrixXd(components, dim);
  gmm.variances = Eigen::MatrixXd(components, dim);
  double total = 0.0;
  for (int c = 0; c < components; ++c) {
    gmm.weights(c) = 0.2 + rng.Uniform();
    total += gmm.weights(c);
    for (int k = 0; k < dim; ++k) {
      gmm.means(c, k) = 2.0 * rng.Normal();
      gmm.variances(c, k) = 0.3 + rng.Uniform();
    }
  }
  gmm.weights /= total;
  return gmm;
}

// Direct density sum in linear space; safe at these magnitudes.
double NaiveLogDensity(const GmmModel &gmm, const Eigen::VectorXd &x) {
  double total = 0.0;
  for (int c = 0; c < gmm.NumComponents(); ++c) {
    double quad = 0.0;
    double norm = 1.0;
    for (int k = 0; k < gmm.Dim(); ++k) {
      const double d = x(k) - gmm.means(c, k);
      quad += d * d / gmm.variances(c, k);
      norm *= 2.0 * std::numbers::pi * gmm.variances(c, k);
    }
    total += gmm.weights(c) * std::exp(-0.5 * quad) / std::sqrt(norm);
  }
  return std::log(total);
}

Eigen::MatrixXd TwoClusterData(int n, uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd data(n, 2);
  for (int i = 0; i < n; ++i) {
    const bool left = i % 2 == 0;
    data(i, 0) = (left ? -4.0 : 4.0) + 0.5 * rng.Normal();
    data(i, 1) = (left ? 1.0 : -1.0) + 0.5 * rng.Normal();
  }
  return data;
}

}  // namespace

TEST_CASE("log density agrees with the linear-space sum") {
  const GmmModel gmm = RandomGmm(5, 3, 11);
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd x(3);
    for (int k = 0; k < 3; ++k) x(k) = 3.0 * rng.Normal();
    CHECK(GmmLogDensity(gmm, x) ==
          doctest::Approx(NaiveLogDensity(gmm, x)).epsilon(1e-10));
  }
  Eigen::VectorXd wrong(4);
  CHECK_THROWS_AS(GmmLogDensity(gmm, wrong), ParameterError);
}

TEST_CASE("posteriors are a simplex point") {
  const GmmModel gmm = RandomGmm(4, 2, 21);
  Rng rng(22);
  for (int i = 0; i < 10; ++i) {
    Eigen::VectorXd x(2);
    x << rng.Normal(), rng.Normal();
    const Eigen::VectorXd p = ComponentPosteriors(gmm, x);
    CHECK(p.minCoeff() >= 0.0);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("em training improves the likelihood and finds clusters") {
  const Eigen::MatrixXd data = TwoClusterData(200, 31);
  EmTrace trace;
  const GmmModel gmm = TrainGmmEm(data, 2, 15, 7, &trace);

  REQUIRE(int(trace.log_likelihood.size()) == 16);
  for (size_t i = 1; i < trace.log_likelihood.size(); ++i) {
    CHECK(trace.log_likelihood[i] >= trace.log_likelihood[i - 1] - 1e-8);
  }

  REQUIRE(gmm.NumComponents() == 2);
  CHECK(gmm.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
  // One mean per cluster, in either order.
  const double signs = gmm.means(0, 0) * gmm.means(1, 0);
  CHECK(signs < 0.0);
  for (int c = 0; c < 2; ++c) {
    CHECK(std::abs(std::abs(gmm.means(c, 0)) - 4.0) < 0.5);
  }
  CHECK(gmm.variances.minCoeff() >= 1e-10);
}

TEST_CASE("em handles a constant dimension with the variance floor") {
  Rng rng(41);
  Eigen::MatrixXd data(50, 2);
  for (int i = 0; i < 50; ++i) {
    data(i, 0) = rng.Normal();
    data(i, 1) = 5.0;
  }
  const GmmModel gmm = TrainGmmEm(data, 2, 5, 3);
  CHECK(gmm.variances.minCoeff() >= 1e-10);
  Eigen::VectorXd x(2);
  x << 0.0, 5.0;
  CHECK(std::isfinite(GmmLogDensity(gmm, x)));
}

TEST_CASE("em input validation") {
  Eigen::MatrixXd tiny(1, 2);
  tiny.setZero();
  CHECK_THROWS_AS(TrainGmmEm(tiny, 2, 3, 0), InsufficientDataError);
  Eigen::MatrixXd data = TwoClusterData(20, 5);
  CHECK_THROWS_AS(TrainGmmEm(data, 0, 3, 0), ParameterError);
  CHECK_THROWS_AS(TrainGmmEm(data, 2, -1, 0), ParameterError);
}

TEST_CASE("map adaptation fixed point on moment-matched data") {
  GmmModel ubm;
  ubm.weights = Eigen::VectorXd::Constant(1, 1.0);
  ubm.means = Eigen::MatrixXd(1, 2);
  ubm.means << 1.0, -2.0;
  ubm.variances = Eigen::MatrixXd(1, 2);
  ubm.variances << 0.5, 2.0;

  // Two symmetric points reproduce the first and second moments exactly.
  Eigen::MatrixXd data(2, 2);
  for (int k = 0; k < 2; ++k) {
    const double sd = std::sqrt(ubm.variances(0, k));
    data(0, k) = ubm.means(0, k) + sd;
    data(1, k) = ubm.means(0, k) - sd;
  }
  const GmmModel adapted = MapAdapt(ubm, data);
  CHECK((adapted.means - ubm.means).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((adapted.variances - ubm.variances).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(std::abs(adapted.weights(0) - 1.0) < 1e-12);
}

TEST_CASE("map adaptation moves means toward enrollment data") {
  const GmmModel ubm = TrainGmmEm(TwoClusterData(200, 51), 2, 10, 1);
  Rng rng(52);
  // Enrollment lives only near the positive cluster, shifted up.
  Eigen::MatrixXd enroll(40, 2);
  for (int i = 0; i < 40; ++i) {
    enroll(i, 0) = 4.5 + 0.3 * rng.Normal();
    enroll(i, 1) = -0.5 + 0.3 * rng.Normal();
  }
  const GmmModel target = MapAdapt(ubm, enroll);

  CHECK(AverageLogLikelihoodRatio(enroll, target, ubm) > 0.0);

  SUBCASE("empty data leaves the model unchanged") {
    const GmmModel same = MapAdapt(ubm, Eigen::MatrixXd(0, 2));
    CHECK(same.means == ubm.means);
    CHECK(same.variances == ubm.variances);
    CHECK(same.weights == ubm.weights);
  }
  SUBCASE("adaptation flags freeze the other parameter groups") {
    MapAdaptationConfig config;
    config.adapt_weights = false;
    config.adapt_variances = false;
    const GmmModel means_only = MapAdapt(ubm, enroll, config);
    CHECK(means_only.weights == ubm.weights);
    CHECK(means_only.variances == ubm.variances);
    CHECK(means_only.means != ubm.means);
  }
  SUBCASE("huge relevance factor pins the prior") {
    MapAdaptationConfig config;
    config.relevance = 1e12;
    const GmmModel pinned = MapAdapt(ubm, enroll, config);
    CHECK((pinned.means - ubm.means).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("bad relevance") {
    MapAdaptationConfig config;
    config.relevance = 0.0;
    CHECK_THROWS_AS(MapAdapt(ubm, enroll, config), ParameterError);
  }
}

TEST_CASE("baum-welch statistics match brute-force posterior sums") {
  const GmmModel ubm = RandomGmm(3, 2, 71);
  Rng rng(72);
  Eigen::MatrixXd frames(25, 2);
  for (int i = 0; i < 25; ++i) {
    frames(i, 0) = 2.0 * rng.Normal();
    frames(i, 1) = 2.0 * rng.Normal();
  }
  const BaumWelchStats stats = AccumulateBaumWelch(ubm, frames);
  REQUIRE(stats.n.size() == 3);
  REQUIRE(stats.f.rows() == 3);
  REQUIRE(stats.f.cols() == 2);
  CHECK(stats.n.sum() == doctest::Approx(25.0).epsilon(1e-10));

  Eigen::VectorXd n_ref = Eigen::VectorXd::Zero(3);
  Eigen::MatrixXd f_ref = Eigen::MatrixXd::Zero(3, 2);
  for (int t = 0; t < 25; ++t) {
    const Eigen::VectorXd p = ComponentPosteriors(ubm, frames.row(t).transpose());
    n_ref += p;
    for (int c = 0; c < 3; ++c) {
      f_ref.row(c) +=
          p(c) * (frames.row(t) - ubm.means.row(c));
    }
  }
  CHECK((stats.n - n_ref).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((stats.f - f_ref).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("ivector extraction agrees with the scalar closed form") {
  // One component, one dimension, rank one: everything is scalar.
  TotalVariabilitySpace tv;
  tv.components = 1;
  tv.dim = 1;
  tv.rank = 1;
  tv.t = Eigen::MatrixXd::Constant(1, 1, 0.8);
  tv.sigma = Eigen::VectorXd::Constant(1, 2.0);

  BaumWelchStats stats;
  stats.n = Eigen::VectorXd::Constant(1, 10.0);
  stats.f = Eigen::MatrixXd::Constant(1, 1, 3.0);

  const Eigen::VectorXd y = ExtractIvector(tv, stats);
  REQUIRE(y.size() == 1);
  const double precision = 1.0 + 0.8 * (1.0 / 2.0) * 10.0 * 0.8;
  const double expected = (0.8 * 3.0 / 2.0) / precision;
  CHECK(y(0) == doctest::Approx(expected).epsilon(1e-12));

  SUBCASE("empty statistics give the prior mean") {
    stats.n.setZero();
    stats.f.setZero();
    const Eigen::VectorXd zero = ExtractIvector(tv, stats);
    CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("shape mismatch") {
    stats.f = Eigen::MatrixXd::Zero(2, 1);
    CHECK_THROWS_AS(ExtractIvector(tv, stats), ParameterError);
  }
}

TEST_CASE("total variability training shrinks the residual") {
  // Utterance statistics generated from a planted subspace.
  const int components = 3;
  const int dim = 2;
  const int rank = 2;
  Rng rng(91);
  GmmModel ubm = RandomGmm(components, dim, 92);
  ubm.variances.setConstant(1.0);

  Eigen::MatrixXd t_true(components * dim, rank);
  for (int i = 0; i < t_true.size(); ++i) {
    t_true(i / rank, i % rank) = rng.Normal();
  }

  std::vector<BaumWelchStats> all;
  for (int u = 0; u < 120; ++u) {
    Eigen::VectorXd w(rank);
    for (int r = 0; r < rank; ++r) w(r) = rng.Normal();
    const Eigen::VectorXd sv = t_true * w;
    BaumWelchStats stats;
    stats.n = Eigen::VectorXd(components);
    stats.f = Eigen::MatrixXd(components, dim);
    for (int c = 0; c < components; ++c) {
      stats.n(c) = 40.0 + 20.0 * rng.Uniform();
      for (int k = 0; k < dim; ++k) {
        stats.f(c, k) = stats.n(c) * sv(c * dim + k);
      }
    }
    all.push_back(stats);
  }

  const TvTrainOptions options{.iterations = 8, .seed = 5,
                               .literal_accumulator = false};
  const TotalVariabilitySpace tv =
      TrainTotalVariability(all, ubm, rank, options);
  REQUIRE(tv.t.rows() == components * dim);
  REQUIRE(tv.t.cols() == rank);
  CHECK(tv.sigma == Eigen::VectorXd::Ones(components * dim));

  // The learned subspace should span the planted one: project the
  // planted columns onto the learned column space and compare norms.
  const Eigen::MatrixXd q =
      Eigen::HouseholderQR<Eigen::MatrixXd>(tv.t).householderQ() *
      Eigen::MatrixXd::Identity(components * dim, rank);
  for (int r = 0; r < rank; ++r) {
    const Eigen::VectorXd col = t_true.col(r);
    const double kept = (q.transpose() * col).norm() / col.norm();
    CHECK(kept > 0.99);
  }

  SUBCASE("literal accumulator variant still runs") {
    TvTrainOptions literal = options;
    literal.literal_accumulator = true;
    const TotalVariabilitySpace alt =
        TrainTotalVariability(all, ubm, rank, literal);
    CHECK(alt.t.allFinite());
    CHECK(alt.t != tv.t);
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(TrainTotalVariability({}, ubm, rank, options),
                    InsufficientDataError);
    CHECK_THROWS_AS(TrainTotalVariability(all, ubm, 0, options),
                    ParameterError);
    CHECK_THROWS_AS(
        TrainTotalVariability(all, ubm, components * dim + 1, options),
        ParameterError);
  }
}
