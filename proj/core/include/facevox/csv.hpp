// include/facevox/csv.hpp

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

#ifndef FACEVOX_CSV_HPP_
#define FACEVOX_CSV_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "facevox/fusion.hpp"

namespace facevox {

// Every text artifact opens with one line identifying the command that
// produced it, a hash of the resolved configuration, and the seed.
struct ProvenanceHeader {
  std::string command;
  uint64_t config_hash = 0;
  uint64_t seed = 0;
};

// "command=... config_hash=... seed=..." without any comment marker, for
// embedding in formats with their own comment syntax.
std::string ProvenanceBody(const ProvenanceHeader &header);

// The same body behind a '#', the first line of every text artifact.
std::string FormatProvenance(const ProvenanceHeader &header);

// Container for per-sample matrices in one text file. Layout:
//   # command=... config_hash=... seed=...
//   # kind=<tag>
//   @ <sample key> <rows> <cols>
//   comma-separated row
//   ...
struct NamedMatrix {
  std::string key;
  Eigen::MatrixXd values;
};

struct MatrixArchive {
  ProvenanceHeader header;
  std::string kind;
  std::vector<NamedMatrix> entries;
};

std::string FormatMatrixArchive(const MatrixArchive &archive);
MatrixArchive ParseMatrixArchive(const std::string &text);

void WriteMatrixArchiveFile(const std::string &path,
                            const MatrixArchive &archive);
MatrixArchive ReadMatrixArchiveFile(const std::string &path);

// Verification trial lists: "id_a,id_b,label" with label 1 for
// same-identity pairs. '#' lines are comments.
struct TrialPair {
  std::string id_a;
  std::string id_b;
  int label = 0;
};

std::vector<TrialPair> ParseTrialCsv(const std::string &text);
std::vector<TrialPair> ReadTrialCsvFile(const std::string &path);

// "id_a,id_b,label,score" rows under a provenance header.
std::string FormatScoreCsv(const ProvenanceHeader &header,
                           const std::vector<TrialPair> &pairs,
                           const std::vector<double> &scores);
void WriteScoreCsvFile(const std::string &path, const ProvenanceHeader &header,
                       const std::vector<TrialPair> &pairs,
                       const std::vector<double> &scores);
std::vector<std::pair<TrialPair, double>> ParseScoreCsv(
    const std::string &text);
std::vector<std::pair<TrialPair, double>> ReadScoreCsvFile(
    const std::string &path);

// "threshold,tpr,fpr" rows under a provenance header.
std::string FormatRocCsv(const ProvenanceHeader &header,
                         const std::vector<RocPoint> &points);
void WriteRocCsvFile(const std::string &path, const ProvenanceHeader &header,
                     const std::vector<RocPoint> &points);

// Simple plot of the curve as an SVG polyline on a unit square. The
// provenance goes in an XML comment on the first line.
std::string FormatRocSvg(const ProvenanceHeader &header,
                         const std::vector<RocPoint> &points);
void WriteRocSvgFile(const std::string &path, const ProvenanceHeader &header,
                     const std::vector<RocPoint> &points);

std::string ReadTextFile(const std::string &path);
void WriteTextFile(const std::string &path, const std::string &text);

}  // namespace facevox

#endif  // FACEVOX_CSV_HPP_
