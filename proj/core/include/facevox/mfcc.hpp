// facevox/mfcc.hpp

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

#ifndef FACEVOX_MFCC_HPP_
#define FACEVOX_MFCC_HPP_

#include <vector>

#include <Eigen/Dense>

#include "facevox/dsp.hpp"

namespace facevox {

enum class FeatureKind { kMfccStatic, kMfccFull, kPlp, kFused };

// Frame-synchronous feature track: one row per frame.
struct AcousticFeatureSequence {
  Eigen::MatrixXd features;
  FeatureKind kind = FeatureKind::kMfccStatic;
};

// Mel scale: mel(f) = 2595 log10(1 + f / 700).  f must be >= 0.
double HzToMel(double hz);
double MelToHz(double mel);

// Triangular mel filterbank over one-sided FFT bins.  Filter l rises from
// bin lower[l] to 1.0 at center[l] and falls back to 0 at upper[l];
// adjacent filters share boundaries (upper[l-1] == center[l-1+1]'s lower).
struct MelFilterbank {
  int fft_size = 0;
  int sample_rate = 0;
  std::vector<int> lower, center, upper;  // bin indices, one per filter
  Eigen::MatrixXd weights;                // filters x (fft_size/2 + 1)
};

// Places n_filters + 2 boundaries equally spaced on the mel axis between
// f_low and f_high and rounds them onto FFT bins.  Throws ParameterError
// when rounded boundaries collide (FFT resolution too low for n_filters).
MelFilterbank BuildMelFilterbank(int n_filters, int fft_size, int sample_rate,
                                 double f_low, double f_high);

// Whether filters integrate the magnitude spectrum sqrt(|X|^2) (default)
// or the power spectrum itself.
enum class FilterDomain { kMagnitude, kPower };

// Static cepstra: filterbank energies m(l), floored at 1e-10, then
// c(i) = sqrt(2/L) * sum_l log10(m(l)) cos((l - 1/2) i pi / L), i=1..n_cepstra.
// A spectrally flat frame (all m(l) equal) yields exactly zero cepstra.
AcousticFeatureSequence MfccFromPower(const PowerSpectrumMatrix &spectrum,
                                      const MelFilterbank &bank,
                                      int n_cepstra,
                                      FilterDomain domain = FilterDomain::kMagnitude);

// Time differences of a per-frame track with context k: the first k frames
// use the forward difference c[t+1]-c[t], the last k frames the backward
// difference c[t]-c[t-1], and interior frames
//   d[t] = sum_{j=1..k} j (c[t+j] - c[t-j]) / sqrt(2 sum_{j=1..k} j^2).
// Requires at least 2k+1 frames.
Eigen::MatrixXd ComputeDeltas(const Eigen::MatrixXd &track, int k);

// Appends delta and delta-delta blocks plus a log-energy column
// ln(max(sum_n frame[n]^2, 1e-10)), producing [c | d | dd | e] with
// 3 * n_cepstra + 1 columns.
AcousticFeatureSequence AppendDeltasAndEnergy(
    const AcousticFeatureSequence &cepstra, const FrameMatrix &frames, int k);

}  // namespace facevox

#endif  // FACEVOX_MFCC_HPP_
