// src/plp.cpp

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

#include "facevox/plp.hpp"

#include <cmath>
#include <numbers>

#include "facevox/error.hpp"

namespace facevox {

namespace {
constexpr double kBandFloor = 1e-10;
constexpr double kTwelveHundredPi = 1200.0 * std::numbers::pi;
}  // namespace

double BarkWarp(double w) {
  if (w < 0.0) throw ParameterError("bark: negative angular frequency");
  const double x = w / kTwelveHundredPi;
  return 6.0 * std::log(x + std::sqrt(x * x + 1.0));
}

double BarkToAngular(double bark) {
  return kTwelveHundredPi * std::sinh(bark / 6.0);
}

double CriticalBandMask(double d) {
  if (d < -1.3) return 0.0;
  if (d <= -0.5) return std::pow(10.0, 2.5 * (d + 0.5));
  if (d < 0.5) return 1.0;
  if (d <= 2.5) return std::pow(10.0, 0.5 - d);
  return 0.0;
}

BarkSpectrum CriticalBandSpectrum(const Eigen::VectorXd &power_row,
                                  int fft_size, int sample_rate) {
  if (sample_rate <= 0) throw ParameterError("plp: sample_rate must be > 0");
  if (int(power_row.size()) != fft_size / 2 + 1) {
    throw ParameterError("plp: power row length does not match fft size");
  }
  const double nyq_bark =
      BarkWarp(std::numbers::pi * double(sample_rate));
  const int n_bands = int(std::floor(nyq_bark)) + 1;

  BarkSpectrum out;
  out.sample_rate = sample_rate;
  out.values = Eigen::VectorXd::Zero(n_bands);
  out.centers_bark.resize(n_bands);
  out.centers_angular.resize(n_bands);

  // Warp every bin once, then mask-weight it into each band.
  Eigen::VectorXd bin_bark(power_row.size());
  for (int k = 0; k < power_row.size(); ++k) {
    const double hz = double(k) * sample_rate / fft_size;
    bin_bark(k) = BarkWarp(2.0 * std::numbers::pi * hz);
  }
  for (int b = 0; b < n_bands; ++b) {
    out.centers_bark(b) = double(b);
    out.centers_angular(b) = BarkToAngular(double(b));
    double acc = 0.0;
    for (int k = 0; k < power_row.size(); ++k) {
      acc += power_row(k) * CriticalBandMask(bin_bark(k) - double(b));
    }
    out.values(b) = acc;
  }
  return out;
}

double EqualLoudnessWeight(double w) {
  const double w2 = w * w;
  const double w4 = w2 * w2;
  const double w6 = w4 * w2;
  const double num = (w2 + 56.8e6) * w4;
  const double den =
      (w2 + 6.3e6) * (w2 + 6.3e6) * (w2 + 0.38e9) * (w6 + 9.58e26);
  return num / den;
}

void ApplyEqualLoudness(BarkSpectrum &spectrum) {
  for (int b = 0; b < spectrum.values.size(); ++b) {
    spectrum.values(b) *= EqualLoudnessWeight(spectrum.centers_angular(b));
  }
}

void IntensityToLoudness(BarkSpectrum &spectrum) {
  spectrum.values = spectrum.values.array().pow(0.33).matrix();
}

Eigen::VectorXd AutocorrFromBands(const Eigen::VectorXd &bands, int n_lags) {
  const int b = int(bands.size());
  if (b < 2) throw ParameterError("plp: need >= 2 bands for autocorrelation");
  if (n_lags < 1) throw ParameterError("plp: need >= 1 lag");
  // Even mirror extension of length m = 2(b-1); inverse DFT reduces to a
  // cosine sum because the extension is real and even.
  const int m = 2 * (b - 1);
  Eigen::VectorXd r(n_lags);
  for (int tau = 0; tau < n_lags; ++tau) {
    double acc = bands(0) + (tau % 2 == 0 ? bands(b - 1) : -bands(b - 1));
    for (int k = 1; k < b - 1; ++k) {
      acc += 2.0 * bands(k) *
             std::cos(std::numbers::pi * double(k) * double(tau) / (b - 1));
    }
    r(tau) = acc / double(m);
  }
  return r;
}

LpcResult LevinsonDurbin(const Eigen::VectorXd &autocorr, int order) {
  if (order < 1) throw ParameterError("lpc: order must be >= 1");
  if (int(autocorr.size()) < order + 1) {
    throw ParameterError("lpc: need order + 1 autocorrelation lags");
  }
  double err = autocorr(0);
  if (!(err > 0.0)) {
    throw SingularityError("lpc: zero-lag autocorrelation is not positive");
  }
  Eigen::VectorXd a = Eigen::VectorXd::Zero(order + 1);  // a(0) unused
  for (int i = 1; i <= order; ++i) {
    double acc = autocorr(i);
    for (int j = 1; j < i; ++j) acc += a(j) * autocorr(i - j);
    const double k = -acc / err;
    Eigen::VectorXd prev = a;
    for (int j = 1; j < i; ++j) a(j) = prev(j) + k * prev(i - j);
    a(i) = k;
    err *= 1.0 - k * k;
    if (!(err > 0.0)) {
      throw SingularityError(
          "lpc: prediction error energy vanished at order " +
          std::to_string(i));
    }
  }
  LpcResult out;
  out.a = a.segment(1, order);
  out.gain = err;
  return out;
}

Eigen::VectorXd PlpFrame(const Eigen::VectorXd &power_row, int fft_size,
                         int sample_rate, int order) {
  BarkSpectrum bands = CriticalBandSpectrum(power_row, fft_size, sample_rate);
  if (int(bands.values.size()) < order + 1) {
    throw ParameterError(
        "plp: sample rate yields too few critical bands for order " +
        std::to_string(order));
  }
  bands.values = bands.values.array().max(kBandFloor).matrix();
  ApplyEqualLoudness(bands);
  IntensityToLoudness(bands);
  const Eigen::VectorXd r = AutocorrFromBands(bands.values, order + 1);
  const LpcResult lpc = LevinsonDurbin(r, order);
  Eigen::VectorXd out(order + 1);
  out.head(order) = lpc.a;
  out(order) = lpc.gain;
  return out;
}

AcousticFeatureSequence PlpFeatures(const PowerSpectrumMatrix &spectrum,
                                    int order) {
  AcousticFeatureSequence out;
  out.kind = FeatureKind::kPlp;
  out.features.resize(spectrum.power.rows(), order + 1);
  for (int f = 0; f < spectrum.power.rows(); ++f) {
    out.features.row(f) = PlpFrame(spectrum.power.row(f), spectrum.fft_size,
                                   spectrum.sample_rate, order);
  }
  return out;
}

}  // namespace facevox
