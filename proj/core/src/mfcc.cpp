// src/mfcc.cpp

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

#include "facevox/mfcc.hpp"

#include <cmath>
#include <numbers>

#include "facevox/error.hpp"

namespace facevox {

namespace {
constexpr double kLogFloor = 1e-10;
}

double HzToMel(double hz) {
  if (hz < 0.0) throw ParameterError("mel: negative frequency");
  return 2595.0 * std::log10(1.0 + hz / 700.0);
}

double MelToHz(double mel) {
  if (mel < 0.0) throw ParameterError("mel: negative mel value");
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank BuildMelFilterbank(int n_filters, int fft_size, int sample_rate,
                                 double f_low, double f_high) {
  if (n_filters < 1) throw ParameterError("filterbank: need >= 1 filter");
  if (fft_size < 2 || (fft_size & (fft_size - 1)) != 0) {
    throw ParameterError("filterbank: fft size must be a power of two");
  }
  if (!(f_low >= 0.0 && f_low < f_high && f_high <= sample_rate / 2.0)) {
    throw ParameterError("filterbank: need 0 <= f_low < f_high <= nyquist");
  }

  const double mel_low = HzToMel(f_low);
  const double mel_high = HzToMel(f_high);
  std::vector<int> bins(size_t(n_filters) + 2);
  for (int i = 0; i < n_filters + 2; ++i) {
    const double mel = mel_low + (mel_high - mel_low) * i / (n_filters + 1);
    const double hz = MelToHz(mel);
    bins[size_t(i)] = int(std::lround(hz * fft_size / sample_rate));
  }
  for (int i = 0; i + 1 < n_filters + 2; ++i) {
    if (bins[size_t(i)] >= bins[size_t(i) + 1]) {
      throw ParameterError(
          "filterbank: FFT resolution too low, boundary bins collide at filter " +
          std::to_string(i));
    }
  }

  MelFilterbank bank;
  bank.fft_size = fft_size;
  bank.sample_rate = sample_rate;
  const int n_bins = fft_size / 2 + 1;
  bank.weights = Eigen::MatrixXd::Zero(n_filters, n_bins);
  for (int l = 0; l < n_filters; ++l) {
    const int o = bins[size_t(l)];
    const int c = bins[size_t(l) + 1];
    const int h = bins[size_t(l) + 2];
    bank.lower.push_back(o);
    bank.center.push_back(c);
    bank.upper.push_back(h);
    for (int k = o; k <= c; ++k) {
      bank.weights(l, k) = double(k - o) / double(c - o);
    }
    for (int k = c + 1; k <= h; ++k) {
      bank.weights(l, k) = double(h - k) / double(h - c);
    }
  }
  return bank;
}

AcousticFeatureSequence MfccFromPower(const PowerSpectrumMatrix &spectrum,
                                      const MelFilterbank &bank,
                                      int n_cepstra, FilterDomain domain) {
  if (bank.fft_size != spectrum.fft_size) {
    throw ParameterError("mfcc: filterbank built for a different fft size");
  }
  const int n_filters = int(bank.weights.rows());
  if (n_cepstra < 1 || n_cepstra > n_filters) {
    throw ParameterError("mfcc: cepstral order must lie in [1, n_filters]");
  }

  const int n_frames = int(spectrum.power.rows());
  Eigen::MatrixXd bands(n_frames, n_filters);
  if (domain == FilterDomain::kMagnitude) {
    bands = (spectrum.power.array().sqrt().matrix()) * bank.weights.transpose();
  } else {
    bands = spectrum.power * bank.weights.transpose();
  }

  // DCT of the log band energies; the (l - 1/2) phase makes a constant band
  // vector integrate to exactly zero for every i >= 1.
  Eigen::MatrixXd dct(n_filters, n_cepstra);
  for (int l = 0; l < n_filters; ++l) {
    for (int i = 1; i <= n_cepstra; ++i) {
      dct(l, i - 1) = std::cos((l + 0.5) * i * std::numbers::pi / n_filters);
    }
  }

  AcousticFeatureSequence out;
  out.kind = FeatureKind::kMfccStatic;
  const double scale = std::sqrt(2.0 / n_filters);
  Eigen::MatrixXd log_bands =
      bands.array().max(kLogFloor).log10().matrix();
  out.features = scale * (log_bands * dct);
  return out;
}

Eigen::MatrixXd ComputeDeltas(const Eigen::MatrixXd &track, int k) {
  if (k < 1) throw ParameterError("delta: context must be >= 1");
  const int f = int(track.rows());
  if (f < 2 * k + 1) {
    throw InsufficientDataError("delta: need at least " +
                                std::to_string(2 * k + 1) + " frames, got " +
                                std::to_string(f));
  }
  double denom = 0.0;
  for (int j = 1; j <= k; ++j) denom += double(j) * j;
  denom = std::sqrt(2.0 * denom);

  Eigen::MatrixXd out(f, track.cols());
  for (int t = 0; t < f; ++t) {
    if (t < k) {
      out.row(t) = track.row(t + 1) - track.row(t);
    } else if (t >= f - k) {
      out.row(t) = track.row(t) - track.row(t - 1);
    } else {
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(track.cols());
      for (int j = 1; j <= k; ++j) {
        acc += double(j) * (track.row(t + j) - track.row(t - j));
      }
      out.row(t) = acc / denom;
    }
  }
  return out;
}

AcousticFeatureSequence AppendDeltasAndEnergy(
    const AcousticFeatureSequence &cepstra, const FrameMatrix &frames, int k) {
  const int f = int(cepstra.features.rows());
  if (int(frames.samples.rows()) != f) {
    throw ParameterError("mfcc: cepstra and frames disagree on frame count");
  }
  const Eigen::MatrixXd d1 = ComputeDeltas(cepstra.features, k);
  const Eigen::MatrixXd d2 = ComputeDeltas(d1, k);

  const int d = int(cepstra.features.cols());
  AcousticFeatureSequence out;
  out.kind = FeatureKind::kMfccFull;
  out.features.resize(f, 3 * d + 1);
  out.features.leftCols(d) = cepstra.features;
  out.features.middleCols(d, d) = d1;
  out.features.middleCols(2 * d, d) = d2;
  for (int t = 0; t < f; ++t) {
    const double energy = frames.samples.row(t).squaredNorm();
    out.features(t, 3 * d) = std::log(std::max(energy, kLogFloor));
  }
  return out;
}

}  // namespace facevox
