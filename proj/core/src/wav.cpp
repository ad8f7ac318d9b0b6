// src/wav.cpp

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

#include "facevox/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "facevox/error.hpp"

namespace facevox {

namespace {

// Little-endian readers over a bounds-checked cursor.
struct Cursor {
  const std::vector<uint8_t> &bytes;
  size_t pos = 0;

  void Need(size_t n) const {
    if (pos + n > bytes.size()) {
      throw FormatError("wav: unexpected end of stream at byte " +
                        std::to_string(pos));
    }
  }
  uint16_t U16() {
    Need(2);
    uint16_t v = uint16_t(bytes[pos]) | uint16_t(bytes[pos + 1]) << 8;
    pos += 2;
    return v;
  }
  uint32_t U32() {
    Need(4);
    uint32_t v = uint32_t(bytes[pos]) | uint32_t(bytes[pos + 1]) << 8 |
                 uint32_t(bytes[pos + 2]) << 16 | uint32_t(bytes[pos + 3]) << 24;
    pos += 4;
    return v;
  }
  std::string Tag() {
    Need(4);
    std::string s(bytes.begin() + pos, bytes.begin() + pos + 4);
    pos += 4;
    return s;
  }
};

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;

void PutU16(std::vector<uint8_t> &out, uint16_t v) {
  out.push_back(uint8_t(v & 0xff));
  out.push_back(uint8_t(v >> 8));
}
void PutU32(std::vector<uint8_t> &out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(uint8_t(v >> (8 * i)));
}
void PutTag(std::vector<uint8_t> &out, const char *tag) {
  out.insert(out.end(), tag, tag + 4);
}

std::vector<uint8_t> BuildWav(const AudioBuffer &audio, uint16_t format,
                              uint16_t bits) {
  const uint32_t n = uint32_t(audio.samples.size());
  const uint16_t block = uint16_t(bits / 8);
  const uint32_t data_size = n * block;
  std::vector<uint8_t> out;
  out.reserve(44 + data_size);
  PutTag(out, "RIFF");
  PutU32(out, 36 + data_size);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, format);
  PutU16(out, 1);  // channels
  PutU32(out, uint32_t(audio.sample_rate));
  PutU32(out, uint32_t(audio.sample_rate) * block);
  PutU16(out, block);
  PutU16(out, bits);
  PutTag(out, "data");
  PutU32(out, data_size);
  for (double s : audio.samples) {
    if (format == kFormatPcm) {
      const double c = std::clamp(s, -1.0, 1.0);
      // Quantize on the same 1/32768 grid the parser divides by, so a
      // round trip stays within half a step (one step at +1.0).
      const long full = std::lrint(c * 32768.0);
      const int16_t q = int16_t(std::clamp(full, -32768l, 32767l));
      PutU16(out, uint16_t(q));
    } else {
      const float f = float(s);
      uint32_t u;
      std::memcpy(&u, &f, 4);
      PutU32(out, u);
    }
  }
  return out;
}

}  // namespace

AudioBuffer ParseWav(const std::vector<uint8_t> &bytes) {
  Cursor cur{bytes};
  if (cur.Tag() != "RIFF") throw FormatError("wav: missing RIFF magic");
  cur.U32();  // declared riff size; data chunk length is what we trust
  if (cur.Tag() != "WAVE") throw FormatError("wav: missing WAVE tag");

  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  AudioBuffer audio;
  bool have_data = false;

  while (cur.pos + 8 <= bytes.size()) {
    const std::string tag = cur.Tag();
    const uint32_t size = cur.U32();
    if (tag == "fmt ") {
      if (size < 16) throw FormatError("wav: fmt chunk too small");
      const size_t end = cur.pos + size;
      format = cur.U16();
      channels = cur.U16();
      sample_rate = cur.U32();
      cur.U32();  // byte rate
      cur.U16();  // block align
      bits = cur.U16();
      cur.Need(end - cur.pos);
      cur.pos = end;
      have_fmt = true;
    } else if (tag == "data") {
      if (!have_fmt) throw FormatError("wav: data chunk before fmt chunk");
      if (channels == 0) throw FormatError("wav: zero channels");
      if (format == kFormatPcm) {
        if (bits != 8 && bits != 16) {
          throw UnsupportedError("wav: unsupported PCM bit depth " +
                                 std::to_string(bits));
        }
      } else if (format == kFormatFloat) {
        if (bits != 32) {
          throw UnsupportedError("wav: unsupported float bit depth " +
                                 std::to_string(bits));
        }
      } else {
        throw UnsupportedError("wav: unsupported format code " +
                               std::to_string(format));
      }
      cur.Need(size);
      const uint16_t bytes_per_sample = bits / 8;
      const uint32_t frame_size = bytes_per_sample * channels;
      if (size % frame_size != 0) {
        throw FormatError("wav: data chunk size is not a whole number of frames");
      }
      const uint32_t n_frames = size / frame_size;
      audio.samples.resize(n_frames);
      for (uint32_t f = 0; f < n_frames; ++f) {
        double acc = 0.0;
        for (uint16_t c = 0; c < channels; ++c) {
          double v = 0.0;
          if (format == kFormatFloat) {
            const uint32_t u = cur.U32();
            float x;
            std::memcpy(&x, &u, 4);
            v = double(x);
          } else if (bits == 16) {
            v = double(int16_t(cur.U16())) / 32768.0;
          } else {
            cur.Need(1);
            v = (double(bytes[cur.pos]) - 128.0) / 128.0;
            ++cur.pos;
          }
          acc += v;
        }
        audio.samples[f] = acc / channels;
      }
      if (size % 2 == 1) ++cur.pos;  // chunk padding
      have_data = true;
    } else {
      cur.Need(size);
      cur.pos += size + (size % 2);
    }
  }
  if (!have_fmt) throw FormatError("wav: missing fmt chunk");
  if (!have_data) throw FormatError("wav: missing data chunk");
  audio.sample_rate = int(sample_rate);
  return audio;
}

AudioBuffer ReadWavFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("wav: cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return ParseWav(bytes);
}

std::vector<uint8_t> WritePcm16Wav(const AudioBuffer &audio) {
  return BuildWav(audio, kFormatPcm, 16);
}

std::vector<uint8_t> WriteFloat32Wav(const AudioBuffer &audio) {
  return BuildWav(audio, kFormatFloat, 32);
}

void WriteWavFile(const std::string &path, const AudioBuffer &audio,
                  bool as_float) {
  const std::vector<uint8_t> bytes =
      as_float ? WriteFloat32Wav(audio) : WritePcm16Wav(audio);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("wav: cannot write " + path);
  out.write(reinterpret_cast<const char *>(bytes.data()),
            std::streamsize(bytes.size()));
}

}  // namespace facevox
