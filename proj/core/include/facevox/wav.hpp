// facevox/wav.hpp

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

#ifndef FACEVOX_WAV_HPP_
#define FACEVOX_WAV_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "facevox/audio.hpp"

namespace facevox {

// Parses a RIFF/WAVE byte stream.  Supported sample codings: PCM 8-bit
// unsigned, PCM 16-bit signed, IEEE float 32-bit.  Integer samples are
// scaled onto [-1, 1] by the type's magnitude (an 8-bit 0 and a 16-bit
// -32768 both map to exactly -1.0).  Multichannel input is mixed down to
// mono by the per-frame mean.  Throws FormatError on malformed bytes and
// UnsupportedError on other codecs or bit depths.
AudioBuffer ParseWav(const std::vector<uint8_t> &bytes);

// Convenience file wrappers.
AudioBuffer ReadWavFile(const std::string &path);

// Serializes mono audio as PCM 16-bit (samples clamped to [-1, 1]) or as
// IEEE float 32-bit (exact).
std::vector<uint8_t> WritePcm16Wav(const AudioBuffer &audio);
std::vector<uint8_t> WriteFloat32Wav(const AudioBuffer &audio);
void WriteWavFile(const std::string &path, const AudioBuffer &audio,
                  bool as_float = false);

}  // namespace facevox

#endif  // FACEVOX_WAV_HPP_
