// facevox/manifest.hpp

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

#ifndef FACEVOX_MANIFEST_HPP_
#define FACEVOX_MANIFEST_HPP_

#include <string>
#include <vector>

namespace facevox {

enum class Modality { kAudio, kImage };
enum class Split { kTrain, kTrainTest, kTest };

std::string ToString(Modality m);
std::string ToString(Split s);

// One dataset sample: a subject label, the sample's modality, the file it
// lives in, and which protocol split it belongs to.
struct ManifestEntry {
  std::string subject_id;
  Modality modality = Modality::kAudio;
  std::string path;
  Split split = Split::kTrain;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
};

// Parses manifest text: one "subject_id,modality,path,split" record per
// line, '#' starts a comment, blank lines ignored.  modality is "audio" or
// "image"; split is "train", "train_test" or "test".  Paths must be unique.
// All parse failures throw FormatError naming the offending line number.
DatasetManifest ParseManifest(const std::string &text);

DatasetManifest ReadManifestFile(const std::string &path);

// Re-emits a manifest in canonical form (one record per line, no comments).
std::string FormatManifest(const DatasetManifest &manifest);

}  // namespace facevox

#endif  // FACEVOX_MANIFEST_HPP_
