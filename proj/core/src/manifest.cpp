// src/manifest.cpp

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

#include "facevox/manifest.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "facevox/error.hpp"

namespace facevox {

namespace {

std::string Trim(const std::string &s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void Fail(int line_no, const std::string &what) {
  throw FormatError("manifest: line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::string ToString(Modality m) {
  return m == Modality::kAudio ? "audio" : "image";
}

std::string ToString(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kTrainTest: return "train_test";
    default: return "test";
  }
}

DatasetManifest ParseManifest(const std::string &text) {
  DatasetManifest manifest;
  std::unordered_set<std::string> seen_paths;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;

    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(Trim(field));
    if (fields.size() != 4) {
      Fail(line_no, "expected 4 comma-separated fields, got " +
                        std::to_string(fields.size()));
    }

    ManifestEntry entry;
    entry.subject_id = fields[0];
    if (entry.subject_id.empty()) Fail(line_no, "empty subject_id");

    if (fields[1] == "audio") {
      entry.modality = Modality::kAudio;
    } else if (fields[1] == "image") {
      entry.modality = Modality::kImage;
    } else {
      Fail(line_no, "unknown modality '" + fields[1] + "'");
    }

    entry.path = fields[2];
    if (entry.path.empty()) Fail(line_no, "empty path");
    if (!seen_paths.insert(entry.path).second) {
      Fail(line_no, "duplicate path '" + entry.path + "'");
    }

    if (fields[3] == "train") {
      entry.split = Split::kTrain;
    } else if (fields[3] == "train_test") {
      entry.split = Split::kTrainTest;
    } else if (fields[3] == "test") {
      entry.split = Split::kTest;
    } else {
      Fail(line_no, "unknown split '" + fields[3] + "'");
    }

    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

DatasetManifest ReadManifestFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw FormatError("manifest: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseManifest(ss.str());
}

std::string FormatManifest(const DatasetManifest &manifest) {
  std::ostringstream out;
  for (const ManifestEntry &e : manifest.entries) {
    out << e.subject_id << ',' << ToString(e.modality) << ',' << e.path << ','
        << ToString(e.split) << '\n';
  }
  return out.str();
}

}  // namespace facevox
