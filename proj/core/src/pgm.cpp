// src/pgm.cpp

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

#include "facevox/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "facevox/error.hpp"

namespace facevox {

namespace {

// Reads the next whitespace-delimited token, skipping '#' comments.
std::string NextToken(const std::vector<uint8_t> &bytes, size_t &pos) {
  while (pos < bytes.size()) {
    const char c = char(bytes[pos]);
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  std::string tok;
  while (pos < bytes.size() &&
         !std::isspace(static_cast<unsigned char>(bytes[pos])) &&
         bytes[pos] != '#') {
    tok.push_back(char(bytes[pos]));
    ++pos;
  }
  if (tok.empty()) throw FormatError("pgm: unexpected end of input");
  return tok;
}

long ParseUint(const std::string &tok, const char *what) {
  if (tok.empty()) throw FormatError(std::string("pgm: empty ") + what);
  for (char c : tok) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw FormatError(std::string("pgm: non-numeric ") + what + " '" + tok +
                        "'");
    }
  }
  return std::strtol(tok.c_str(), nullptr, 10);
}

}  // namespace

GrayImage ParsePgm(const std::vector<uint8_t> &bytes) {
  size_t pos = 0;
  const std::string magic = NextToken(bytes, pos);
  if (magic != "P2" && magic != "P5") {
    throw FormatError("pgm: bad magic '" + magic + "'");
  }
  const long width = ParseUint(NextToken(bytes, pos), "width");
  const long height = ParseUint(NextToken(bytes, pos), "height");
  if (width <= 0 || height <= 0 || width > (1 << 20) || height > (1 << 20)) {
    throw FormatError("pgm: out-of-range dimensions");
  }
  const long maxval = ParseUint(NextToken(bytes, pos), "maxval");
  if (maxval <= 0) throw FormatError("pgm: maxval must be positive");
  if (maxval > 255) {
    throw UnsupportedError("pgm: maxval " + std::to_string(maxval) +
                           " exceeds 255");
  }

  GrayImage img;
  img.width = int(width);
  img.height = int(height);
  const size_t n = size_t(width) * size_t(height);
  img.pixels.assign(n, 0.0);
  if (magic == "P5") {
    ++pos;  // exactly one whitespace byte separates maxval from the raster
    if (pos + n > bytes.size()) throw FormatError("pgm: truncated P5 raster");
    for (size_t i = 0; i < n; ++i) img.pixels[i] = double(bytes[pos + i]);
  } else {
    for (size_t i = 0; i < n; ++i) {
      const long v = ParseUint(NextToken(bytes, pos), "pixel");
      if (v > maxval) {
        throw FormatError("pgm: pixel value " + std::to_string(v) +
                          " exceeds maxval");
      }
      img.pixels[i] = double(v);
    }
  }
  return img;
}

GrayImage ReadPgmFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("pgm: cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return ParsePgm(bytes);
}

std::vector<uint8_t> WritePgm(const GrayImage &img,
                              const std::string &comment) {
  std::string header = "P5\n";
  if (!comment.empty()) header += "# " + comment + "\n";
  header += std::to_string(img.width) + " " + std::to_string(img.height) +
            "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.pixels.size());
  for (double p : img.pixels) {
    const double c = std::clamp(p, 0.0, 255.0);
    out.push_back(uint8_t(std::lrint(c)));
  }
  return out;
}

void WritePgmFile(const std::string &path, const GrayImage &img,
                  const std::string &comment) {
  const std::vector<uint8_t> bytes = WritePgm(img, comment);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("pgm: cannot write " + path);
  out.write(reinterpret_cast<const char *>(bytes.data()),
            std::streamsize(bytes.size()));
}

}  // namespace facevox
