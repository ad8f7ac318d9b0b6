// benchmarks/bench_main.cpp

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

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "facevox/convnet.hpp"
#include "facevox/dsp.hpp"
#include "facevox/face_detect.hpp"
#include "facevox/gmm.hpp"
#include "facevox/image.hpp"
#include "facevox/mfcc.hpp"
#include "facevox/network.hpp"
#include "facevox/plp.hpp"
#include "facevox/rng.hpp"

namespace {

using namespace facevox;

std::vector<double> MakeTestSignal(int sample_rate, double seconds) {
  Rng rng(1);
  const int n = int(sample_rate * seconds);
  std::vector<double> signal(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = double(i) / sample_rate;
    signal[size_t(i)] = 0.4 * std::sin(2.0 * std::numbers::pi * 440.0 * t) +
                        0.2 * std::sin(2.0 * std::numbers::pi * 1320.0 * t) +
                        0.05 * rng.Normal();
  }
  return signal;
}

void BM_MfccExtraction(benchmark::State &state) {
  const int sample_rate = 16000;
  const std::vector<double> signal = MakeTestSignal(sample_rate, 1.0);
  for (auto _ : state) {
    const std::vector<double> emphasized = PreEmphasize(signal, 0.97);
    const FrameMatrix frames =
        FrameSignal(emphasized, sample_rate, 25.0, 20.0);
    const PowerSpectrumMatrix power =
        ComputePowerSpectrum(ApplyHamming(frames));
    const MelFilterbank bank = BuildMelFilterbank(
        24, power.fft_size, sample_rate, 0.0, sample_rate / 2.0);
    const AcousticFeatureSequence cepstra = MfccFromPower(power, bank, 13);
    const AcousticFeatureSequence full =
        AppendDeltasAndEnergy(cepstra, frames, 2);
    benchmark::DoNotOptimize(full.features.sum());
  }
}
BENCHMARK(BM_MfccExtraction)->Unit(benchmark::kMillisecond);

void BM_PlpExtraction(benchmark::State &state) {
  const int sample_rate = 16000;
  const std::vector<double> signal = MakeTestSignal(sample_rate, 1.0);
  const FrameMatrix frames = FrameSignal(signal, sample_rate, 25.0, 20.0);
  const PowerSpectrumMatrix power = ComputePowerSpectrum(ApplyHamming(frames));
  for (auto _ : state) {
    const AcousticFeatureSequence features = PlpFeatures(power, 12);
    benchmark::DoNotOptimize(features.features.sum());
  }
}
BENCHMARK(BM_PlpExtraction)->Unit(benchmark::kMillisecond);

void BM_GmmLogDensity(benchmark::State &state) {
  const int components = int(state.range(0));
  const int dim = 40;
  Rng rng(2);
  GmmModel gmm;
  gmm.weights = Eigen::VectorXd::Constant(components, 1.0 / components);
  gmm.means = Eigen::MatrixXd::Zero(components, dim);
  gmm.variances = Eigen::MatrixXd::Ones(components, dim);
  for (int i = 0; i < gmm.means.size(); ++i) {
    gmm.means(i / dim, i % dim) = rng.Normal();
  }
  Eigen::VectorXd frame(dim);
  for (int i = 0; i < dim; ++i) frame(i) = rng.Normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(GmmLogDensity(gmm, frame));
  }
}
BENCHMARK(BM_GmmLogDensity)->Arg(16)->Arg(64)->Arg(256);

void BM_IntegralRectSums(benchmark::State &state) {
  const int size = int(state.range(0));
  Rng rng(3);
  GrayImage image(size, size);
  for (double &p : image.pixels) p = 255.0 * rng.Uniform();
  for (auto _ : state) {
    const IntegralImage integral = ComputeIntegral(image);
    double acc = 0.0;
    for (int y = 0; y + 16 <= size; y += 4) {
      for (int x = 0; x + 16 <= size; x += 4) {
        acc += RectSum(integral, x, y, 16, 16);
      }
    }
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_IntegralRectSums)->Arg(64)->Arg(128);

void BM_EmbedderForward(benchmark::State &state) {
  EmbedderConfig config;
  config.image_size = 32;
  config.conv_channels = 8;
  config.trunk_units = 64;
  config.embedding_dim = 16;
  config.n_classes = 20;
  config.seed = 4;
  const LayeredNetwork net = MakeEmbedderNetwork(config);
  Rng rng(5);
  GrayImage image(32, 32);
  for (double &p : image.pixels) p = 255.0 * rng.Uniform();
  const Eigen::VectorXd input = ImageToInput(image);
  for (auto _ : state) {
    const ForwardTrace trace = Forward(net, input);
    benchmark::DoNotOptimize(trace.Output().sum());
  }
}
BENCHMARK(BM_EmbedderForward)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
