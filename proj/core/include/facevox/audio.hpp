// facevox/audio.hpp

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

#ifndef FACEVOX_AUDIO_HPP_
#define FACEVOX_AUDIO_HPP_

#include <vector>

namespace facevox {

// Mono audio, samples normalized to [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 0;
};

}  // namespace facevox

#endif  // FACEVOX_AUDIO_HPP_
