// facevox/error.hpp

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

#ifndef FACEVOX_ERROR_HPP_
#define FACEVOX_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace facevox {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Malformed or truncated input bytes (WAV/PGM/manifest/model blobs).
class FormatError : public Error {
 public:
  explicit FormatError(const std::string &msg) : Error(msg) {}
};

// Recognized container but a codec/layout we do not handle.
class UnsupportedError : public FormatError {
 public:
  explicit UnsupportedError(const std::string &msg) : FormatError(msg) {}
};

// Model blob whose version field does not match this build.
class VersionError : public FormatError {
 public:
  explicit VersionError(const std::string &msg) : FormatError(msg) {}
};

// Model blob whose payload is truncated or inconsistent.
class IntegrityError : public FormatError {
 public:
  explicit IntegrityError(const std::string &msg) : FormatError(msg) {}
};

// Caller passed an argument outside the documented domain.
class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string &msg) : Error(msg) {}
};

// Not enough samples/frames/points to perform the operation at all.
class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string &msg) : Error(msg) {}
};

// A linear system or statistic that the math requires to be non-degenerate
// turned out singular (rank-deficient solve, non-positive prediction error,
// zero-norm vector, zero score range, ...).
class SingularityError : public Error {
 public:
  explicit SingularityError(const std::string &msg) : Error(msg) {}
};

}  // namespace facevox

#endif  // FACEVOX_ERROR_HPP_
