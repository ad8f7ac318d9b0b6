// src/dsp.cpp

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

#include "facevox/dsp.hpp"

#include <cmath>
#include <numbers>

#include "facevox/error.hpp"

namespace facevox {

namespace {

bool IsPowerOfTwo(int n) { return n > 0 && (n & (n - 1)) == 0; }

int NextPowerOfTwo(int n) {
  int k = 1;
  while (k < n) k <<= 1;
  return k;
}

}  // namespace

std::vector<double> PreEmphasize(const std::vector<double> &signal, double a) {
  if (a < 0.0 || a > 1.0) {
    throw ParameterError("pre-emphasis coefficient must lie in [0, 1], got " +
                         std::to_string(a));
  }
  std::vector<double> out(signal.size());
  if (signal.empty()) return out;
  out[0] = signal[0];
  for (size_t n = 1; n < signal.size(); ++n) {
    out[n] = signal[n] - a * signal[n - 1];
  }
  return out;
}

FrameMatrix FrameSignal(const std::vector<double> &signal, int sample_rate,
                        double frame_ms, double hop_ms) {
  if (sample_rate <= 0) throw ParameterError("frame: sample_rate must be > 0");
  if (!(frame_ms > hop_ms && hop_ms > 0.0)) {
    throw ParameterError("frame: need frame_ms > hop_ms > 0");
  }
  const int n = int(std::lround(frame_ms * sample_rate / 1000.0));
  const int h = int(std::lround(hop_ms * sample_rate / 1000.0));
  if (n <= 1 || h <= 0) throw ParameterError("frame: degenerate frame/hop");
  if (int(signal.size()) < n) {
    throw InsufficientDataError("frame: signal shorter than one frame (" +
                                std::to_string(signal.size()) + " < " +
                                std::to_string(n) + ")");
  }
  const int f = int((signal.size() - size_t(n)) / size_t(h)) + 1;
  FrameMatrix out;
  out.sample_rate = sample_rate;
  out.samples.resize(f, n);
  for (int i = 0; i < f; ++i) {
    for (int j = 0; j < n; ++j) {
      out.samples(i, j) = signal[size_t(i) * h + j];
    }
  }
  return out;
}

std::vector<double> HammingWindow(int n, HammingVariant variant) {
  if (n < 2) throw ParameterError("hamming: window length must be >= 2");
  const double sign = variant == HammingVariant::kStandard ? -1.0 : 1.0;
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = 0.54 + sign * 0.46 *
                      std::cos(2.0 * std::numbers::pi * i / (n - 1));
  }
  return w;
}

FrameMatrix ApplyHamming(const FrameMatrix &frames, HammingVariant variant) {
  const std::vector<double> w =
      HammingWindow(int(frames.samples.cols()), variant);
  FrameMatrix out = frames;
  for (int j = 0; j < out.samples.cols(); ++j) {
    out.samples.col(j) *= w[size_t(j)];
  }
  return out;
}

void Fft(std::vector<std::complex<double>> &data) {
  const int n = int(data.size());
  if (!IsPowerOfTwo(n)) {
    throw ParameterError("fft: size must be a power of two, got " +
                         std::to_string(n));
  }
  // Bit-reversal permutation.
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[size_t(i)], data[size_t(j)]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / len;
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (int k = 0; k < len / 2; ++k) {
        const std::complex<double> u = data[size_t(i + k)];
        const std::complex<double> v = data[size_t(i + k + len / 2)] * w;
        data[size_t(i + k)] = u + v;
        data[size_t(i + k + len / 2)] = u - v;
        w *= wlen;
      }
    }
  }
}

PowerSpectrumMatrix ComputePowerSpectrum(const FrameMatrix &frames,
                                         int fft_size) {
  const int n = int(frames.samples.cols());
  const int k = fft_size == 0 ? NextPowerOfTwo(n) : fft_size;
  if (!IsPowerOfTwo(k)) {
    throw ParameterError("power spectrum: fft size must be a power of two");
  }
  if (k < n) {
    throw ParameterError("power spectrum: fft size " + std::to_string(k) +
                         " shorter than frame length " + std::to_string(n));
  }
  PowerSpectrumMatrix out;
  out.fft_size = k;
  out.sample_rate = frames.sample_rate;
  const int bins = k / 2 + 1;
  out.power.resize(frames.samples.rows(), bins);
  std::vector<std::complex<double>> buf(static_cast<size_t>(k));
  for (int f = 0; f < frames.samples.rows(); ++f) {
    for (int j = 0; j < n; ++j) buf[size_t(j)] = frames.samples(f, j);
    std::fill(buf.begin() + n, buf.end(), std::complex<double>(0.0, 0.0));
    Fft(buf);
    for (int b = 0; b < bins; ++b) out.power(f, b) = std::norm(buf[size_t(b)]);
  }
  return out;
}

}  // namespace facevox
