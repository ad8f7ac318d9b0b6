// facevox/plp.hpp

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

#ifndef FACEVOX_PLP_HPP_
#define FACEVOX_PLP_HPP_

#include <Eigen/Dense>

#include "facevox/dsp.hpp"
#include "facevox/mfcc.hpp"

namespace facevox {

// Bark warp of an angular frequency w [rad/s]:
//   warp(w) = 6 ln( w/(1200 pi) + sqrt((w/(1200 pi))^2 + 1) ).
double BarkWarp(double w);

// Inverse of BarkWarp: w = 1200 pi sinh(bark / 6).
double BarkToAngular(double bark);

// Asymmetric critical-band masking curve as a function of the Bark-axis
// offset d from the band center:
//   0                      d < -1.3
//   10^{2.5 (d + 0.5)}     -1.3 <= d <= -0.5
//   1                      -0.5 <  d <  0.5
//   10^{0.5 - d}            0.5 <= d <= 2.5
//   0                      d > 2.5
double CriticalBandMask(double d);

// Band energies at unit-Bark centers 0, 1, ..., floor(warp(pi * sample_rate)),
// each the mask-weighted sum of warped one-sided power bins.  Every center
// keeps both its Bark position and its angular frequency.
struct BarkSpectrum {
  Eigen::VectorXd values;
  Eigen::VectorXd centers_bark;
  Eigen::VectorXd centers_angular;
  int sample_rate = 0;
};

BarkSpectrum CriticalBandSpectrum(const Eigen::VectorXd &power_row,
                                  int fft_size, int sample_rate);

// Equal-loudness preemphasis weight:
//   E(w) = ((w^2 + 56.8e6) w^4) /
//          ((w^2 + 6.3e6)^2 (w^2 + 0.38e9) (w^6 + 9.58e26)).
// E(0) = 0, so the DC band is always zeroed.
double EqualLoudnessWeight(double w);

// Applies E(w) to every band in place.
void ApplyEqualLoudness(BarkSpectrum &spectrum);

// Intensity-to-loudness compression value^0.33, applied in place.
void IntensityToLoudness(BarkSpectrum &spectrum);

// Autocorrelation lags r(0..n_lags-1) of the band spectrum, treating the
// values as samples of an even spectrum on [0, pi] (mirror extension +
// inverse DFT).  A non-negative spectrum always yields r(0) >= |r(tau)|.
Eigen::VectorXd AutocorrFromBands(const Eigen::VectorXd &bands, int n_lags);

// All-pole fit 1 / (1 + sum_i a_i z^-i) of prediction order `order` from
// autocorrelation lags.  gain is the final prediction-error energy; the
// recursion throws SingularityError if any intermediate error energy is
// not strictly positive.
struct LpcResult {
  Eigen::VectorXd a;  // a_1 .. a_order
  double gain = 0.0;
};

LpcResult LevinsonDurbin(const Eigen::VectorXd &autocorr, int order);

// Full perceptual linear prediction of one power-spectrum row:
// critical bands (floored at 1e-10) -> equal loudness -> ^0.33 ->
// autocorrelation -> Levinson-Durbin.  Output is [a_1..a_order, gain].
Eigen::VectorXd PlpFrame(const Eigen::VectorXd &power_row, int fft_size,
                         int sample_rate, int order);

// PlpFrame applied to every row, as a feature sequence of width order + 1.
AcousticFeatureSequence PlpFeatures(const PowerSpectrumMatrix &spectrum,
                                    int order);

}  // namespace facevox

#endif  // FACEVOX_PLP_HPP_
