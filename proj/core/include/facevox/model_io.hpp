// include/facevox/model_io.hpp

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

#ifndef FACEVOX_MODEL_IO_HPP_
#define FACEVOX_MODEL_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "facevox/csv.hpp"
#include "facevox/face_align.hpp"
#include "facevox/face_detect.hpp"
#include "facevox/fusion.hpp"
#include "facevox/gmm.hpp"
#include "facevox/ivector.hpp"
#include "facevox/network.hpp"

namespace facevox {

// Binary model container: "BMID" magic, a little-endian u32 format
// version, a u8 payload kind, then the kind-specific payload. All
// integers are little-endian; doubles are raw IEEE-754 bit patterns,
// so a round trip reproduces the file byte for byte.
enum class BlobKind : uint8_t {
  kGmm = 0,
  kTotalVariability = 1,
  kNetwork = 2,
  kDetector = 3,
  kSdm = 4,
  kPca = 5,
};

constexpr uint32_t kBlobFormatVersion = 1;

BlobKind PeekBlobKind(const std::vector<uint8_t> &bytes);

std::vector<uint8_t> SerializeGmm(const GmmModel &model);
GmmModel DeserializeGmm(const std::vector<uint8_t> &bytes);

std::vector<uint8_t> SerializeTotalVariability(
    const TotalVariabilitySpace &space);
TotalVariabilitySpace DeserializeTotalVariability(
    const std::vector<uint8_t> &bytes);

std::vector<uint8_t> SerializeNetwork(const LayeredNetwork &net);
LayeredNetwork DeserializeNetwork(const std::vector<uint8_t> &bytes);

std::vector<uint8_t> SerializeDetector(const HaarDetector &detector);
HaarDetector DeserializeDetector(const std::vector<uint8_t> &bytes);

std::vector<uint8_t> SerializeSdm(const SdmModel &model);
SdmModel DeserializeSdm(const std::vector<uint8_t> &bytes);

std::vector<uint8_t> SerializePca(const PcaModel &model);
PcaModel DeserializePca(const std::vector<uint8_t> &bytes);

// Blob files on disk may open with one "# command=..." provenance line
// before the payload; ReadBlobFile strips it, so callers always see the
// payload starting at the magic.
std::vector<uint8_t> ReadBlobFile(const std::string &path);
void WriteBlobFile(const std::string &path,
                   const std::vector<uint8_t> &bytes);
void WriteBlobFile(const std::string &path, const std::vector<uint8_t> &bytes,
                   const ProvenanceHeader &header);

}  // namespace facevox

#endif  // FACEVOX_MODEL_IO_HPP_
