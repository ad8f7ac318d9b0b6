// facevox/pgm.hpp

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

#ifndef FACEVOX_PGM_HPP_
#define FACEVOX_PGM_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "facevox/image.hpp"

namespace facevox {

// Parses PGM in ASCII (P2) or binary (P5) form with maxval <= 255.
// '#' comments are allowed anywhere in the header.  Throws FormatError on
// malformed/truncated input and UnsupportedError on maxval > 255.
GrayImage ParsePgm(const std::vector<uint8_t> &bytes);

GrayImage ReadPgmFile(const std::string &path);

// Serializes as binary P5 with maxval 255; pixels are rounded and clamped.
// A nonempty comment is emitted as a '#' header line directly after the
// magic (the earliest spot the format allows one).
std::vector<uint8_t> WritePgm(const GrayImage &img,
                              const std::string &comment = "");
void WritePgmFile(const std::string &path, const GrayImage &img,
                  const std::string &comment = "");

}  // namespace facevox

#endif  // FACEVOX_PGM_HPP_
