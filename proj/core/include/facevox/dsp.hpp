// facevox/dsp.hpp

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

#ifndef FACEVOX_DSP_HPP_
#define FACEVOX_DSP_HPP_

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace facevox {

// Rows are analysis frames of N = round(frame_ms * sample_rate / 1000)
// samples, hopped by H = round(hop_ms * sample_rate / 1000).
struct FrameMatrix {
  Eigen::MatrixXd samples;  // frames x N
  int sample_rate = 0;
};

// Rows are one-sided power spectra |X(k)|^2, k = 0..fft_size/2.
struct PowerSpectrumMatrix {
  Eigen::MatrixXd power;  // frames x (fft_size/2 + 1)
  int fft_size = 0;
  int sample_rate = 0;
};

// Hamming window w(n) = 0.54 - 0.46 cos(2 pi n / (N-1)).  kFlippedSign
// negates the cosine term's sign (a legacy variant kept behind a config
// switch; it peaks at the frame edges).
enum class HammingVariant { kStandard, kFlippedSign };

// First-order high-pass s'(n) = s(n) - a * s(n-1), with s'(0) = s(0).
// Requires a in [0, 1].
std::vector<double> PreEmphasize(const std::vector<double> &signal, double a);

// Slices a signal into overlapping frames.  Requires frame_ms > hop_ms > 0
// and at least one whole frame of samples.  The trailing remainder that
// does not fill a frame is dropped.
FrameMatrix FrameSignal(const std::vector<double> &signal, int sample_rate,
                        double frame_ms, double hop_ms);

std::vector<double> HammingWindow(int n, HammingVariant variant);

// Multiplies every frame elementwise by the Hamming window.
FrameMatrix ApplyHamming(const FrameMatrix &frames,
                         HammingVariant variant = HammingVariant::kStandard);

// In-place radix-2 decimation-in-time FFT; data.size() must be a power of
// two.  Forward unnormalized transform X[k] = sum_n x[n] e^{-2 pi i nk/K}.
void Fft(std::vector<std::complex<double>> &data);

// One-sided power spectrum of every frame.  fft_size == 0 selects the
// smallest power of two >= frame length; an explicit fft_size must be a
// power of two >= frame length.  Frames are zero-padded on the right.
PowerSpectrumMatrix ComputePowerSpectrum(const FrameMatrix &frames,
                                         int fft_size = 0);

}  // namespace facevox

#endif  // FACEVOX_DSP_HPP_
