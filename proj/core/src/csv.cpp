// src/csv.cpp

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

#include "facevox/csv.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "facevox/error.hpp"

namespace facevox {

namespace {

std::string Trim(const std::string &s) {
  size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> SplitLines(const std::string &text) {
  std::vector<std::string> lines;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> SplitCommas(const std::string &line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(Trim(field));
  return fields;
}

double ParseDouble(const std::string &token, int line_number) {
  char *end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') {
    throw FormatError("csv: bad number at line " +
                      std::to_string(line_number) + ": '" + token + "'");
  }
  return value;
}

long ParseLong(const std::string &token, int line_number) {
  long value = 0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw FormatError("csv: bad integer at line " +
                      std::to_string(line_number) + ": '" + token + "'");
  }
  return value;
}

void AppendDouble(std::ostringstream &out, double value) {
  out << std::setprecision(17) << value;
}

std::string HexU64(uint64_t value) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << value;
  return out.str();
}

std::string CommentToken(const std::string &line, const std::string &name) {
  const size_t pos = line.find(name + "=");
  if (pos == std::string::npos) return "";
  const size_t start = pos + name.size() + 1;
  const size_t end = line.find(' ', start);
  return line.substr(start, end == std::string::npos ? end : end - start);
}

// Recovers provenance fields from a "# command=... config_hash=... seed=..."
// comment; other comments and unparsable tokens are left alone.
void ParseProvenanceInto(const std::string &line, ProvenanceHeader &header) {
  const std::string command = CommentToken(line, "command");
  if (!command.empty()) header.command = command;
  try {
    const std::string hash = CommentToken(line, "config_hash");
    if (!hash.empty()) header.config_hash = std::stoull(hash, nullptr, 16);
    const std::string seed = CommentToken(line, "seed");
    if (!seed.empty()) header.seed = std::stoull(seed, nullptr, 10);
  } catch (const std::exception &) {
  }
}

}  // namespace

std::string ProvenanceBody(const ProvenanceHeader &header) {
  std::ostringstream out;
  out << "command=" << header.command << " config_hash="
      << HexU64(header.config_hash) << " seed=" << std::dec << header.seed;
  return out.str();
}

std::string FormatProvenance(const ProvenanceHeader &header) {
  return "# " + ProvenanceBody(header);
}

std::string FormatMatrixArchive(const MatrixArchive &archive) {
  std::ostringstream out;
  out << FormatProvenance(archive.header) << "\n";
  out << "# kind=" << archive.kind << "\n";
  for (const NamedMatrix &entry : archive.entries) {
    out << "@ " << entry.key << " " << entry.values.rows() << " "
        << entry.values.cols() << "\n";
    for (int r = 0; r < entry.values.rows(); ++r) {
      for (int c = 0; c < entry.values.cols(); ++c) {
        if (c > 0) out << ",";
        AppendDouble(out, entry.values(r, c));
      }
      out << "\n";
    }
  }
  return out.str();
}

MatrixArchive ParseMatrixArchive(const std::string &text) {
  MatrixArchive archive;
  const std::vector<std::string> lines = SplitLines(text);
  size_t i = 0;
  int line_number = 0;
  while (i < lines.size()) {
    const std::string line = Trim(lines[i]);
    ++line_number;
    if (line.empty()) {
      ++i;
      continue;
    }
    if (line[0] == '#') {
      const size_t kind_pos = line.find("kind=");
      if (kind_pos != std::string::npos) {
        archive.kind = Trim(line.substr(kind_pos + 5));
      } else {
        ParseProvenanceInto(line, archive.header);
      }
      ++i;
      continue;
    }
    if (line[0] != '@') {
      throw FormatError("archive: expected a section at line " +
                        std::to_string(line_number));
    }
    std::istringstream section(line.substr(1));
    std::string key;
    long rows = 0;
    long cols = 0;
    if (!(section >> key >> rows >> cols) || rows < 0 || cols < 0) {
      throw FormatError("archive: bad section header at line " +
                        std::to_string(line_number));
    }
    NamedMatrix entry;
    entry.key = key;
    entry.values.resize(rows, cols);
    ++i;
    for (long r = 0; r < rows; ++r, ++i, ++line_number) {
      if (i >= lines.size()) {
        throw FormatError("archive: truncated section '" + key + "'");
      }
      const std::vector<std::string> fields = SplitCommas(Trim(lines[i]));
      if (long(fields.size()) != cols) {
        throw FormatError("archive: row width mismatch at line " +
                          std::to_string(line_number + 1));
      }
      for (long c = 0; c < cols; ++c) {
        entry.values(r, c) = ParseDouble(fields[size_t(c)], line_number + 1);
      }
    }
    archive.entries.push_back(std::move(entry));
  }
  return archive;
}

void WriteMatrixArchiveFile(const std::string &path,
                            const MatrixArchive &archive) {
  WriteTextFile(path, FormatMatrixArchive(archive));
}

MatrixArchive ReadMatrixArchiveFile(const std::string &path) {
  return ParseMatrixArchive(ReadTextFile(path));
}

std::vector<TrialPair> ParseTrialCsv(const std::string &text) {
  std::vector<TrialPair> pairs;
  const std::vector<std::string> lines = SplitLines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string line = Trim(lines[i]);
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = SplitCommas(line);
    if (fields.size() != 3) {
      throw FormatError("trials: expected id_a,id_b,label at line " +
                        std::to_string(i + 1));
    }
    TrialPair pair;
    pair.id_a = fields[0];
    pair.id_b = fields[1];
    const long label = ParseLong(fields[2], int(i + 1));
    if (label != 0 && label != 1) {
      throw FormatError("trials: label must be 0 or 1 at line " +
                        std::to_string(i + 1));
    }
    pair.label = int(label);
    if (pair.id_a.empty() || pair.id_b.empty()) {
      throw FormatError("trials: empty id at line " + std::to_string(i + 1));
    }
    pairs.push_back(std::move(pair));
  }
  if (pairs.empty()) throw FormatError("trials: no trial rows");
  return pairs;
}

std::vector<TrialPair> ReadTrialCsvFile(const std::string &path) {
  return ParseTrialCsv(ReadTextFile(path));
}

std::string FormatScoreCsv(const ProvenanceHeader &header,
                           const std::vector<TrialPair> &pairs,
                           const std::vector<double> &scores) {
  if (pairs.size() != scores.size()) {
    throw ParameterError("scores: pair and score counts differ");
  }
  std::ostringstream out;
  out << FormatProvenance(header) << "\n";
  out << "# columns=id_a,id_b,label,score\n";
  for (size_t i = 0; i < pairs.size(); ++i) {
    out << pairs[i].id_a << "," << pairs[i].id_b << "," << pairs[i].label
        << ",";
    AppendDouble(out, scores[i]);
    out << "\n";
  }
  return out.str();
}

void WriteScoreCsvFile(const std::string &path, const ProvenanceHeader &header,
                       const std::vector<TrialPair> &pairs,
                       const std::vector<double> &scores) {
  WriteTextFile(path, FormatScoreCsv(header, pairs, scores));
}

std::vector<std::pair<TrialPair, double>> ParseScoreCsv(
    const std::string &text) {
  std::vector<std::pair<TrialPair, double>> rows;
  const std::vector<std::string> lines = SplitLines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string line = Trim(lines[i]);
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = SplitCommas(line);
    if (fields.size() != 4) {
      throw FormatError("scores: expected id_a,id_b,label,score at line " +
                        std::to_string(i + 1));
    }
    TrialPair pair;
    pair.id_a = fields[0];
    pair.id_b = fields[1];
    const long label = ParseLong(fields[2], int(i + 1));
    if (label != 0 && label != 1) {
      throw FormatError("scores: label must be 0 or 1 at line " +
                        std::to_string(i + 1));
    }
    pair.label = int(label);
    rows.emplace_back(pair, ParseDouble(fields[3], int(i + 1)));
  }
  if (rows.empty()) throw FormatError("scores: no score rows");
  return rows;
}

std::vector<std::pair<TrialPair, double>> ReadScoreCsvFile(
    const std::string &path) {
  return ParseScoreCsv(ReadTextFile(path));
}

std::string FormatRocCsv(const ProvenanceHeader &header,
                         const std::vector<RocPoint> &points) {
  std::ostringstream out;
  out << FormatProvenance(header) << "\n";
  out << "# columns=threshold,tpr,fpr\n";
  for (const RocPoint &point : points) {
    AppendDouble(out, point.threshold);
    out << ",";
    AppendDouble(out, point.tpr);
    out << ",";
    AppendDouble(out, point.fpr);
    out << "\n";
  }
  return out.str();
}

void WriteRocCsvFile(const std::string &path, const ProvenanceHeader &header,
                     const std::vector<RocPoint> &points) {
  WriteTextFile(path, FormatRocCsv(header, points));
}

std::string FormatRocSvg(const ProvenanceHeader &header,
                         const std::vector<RocPoint> &points) {
  const int size = 400;
  const int margin = 40;
  const int span = size - 2 * margin;
  std::ostringstream out;
  out << "<!-- " << ProvenanceBody(header) << " -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
      << "\" height=\"" << size << "\">\n";
  out << "  <rect x=\"" << margin << "\" y=\"" << margin << "\" width=\""
      << span << "\" height=\"" << span
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
  out << "  <line x1=\"" << margin << "\" y1=\"" << size - margin << "\" x2=\""
      << size - margin << "\" y2=\"" << margin
      << "\" stroke=\"#ccc\" stroke-dasharray=\"4\"/>\n";
  out << "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" "
         "points=\"";
  for (size_t i = 0; i < points.size(); ++i) {
    const double px = margin + points[i].fpr * span;
    const double py = size - margin - points[i].tpr * span;
    if (i > 0) out << " ";
    out << std::setprecision(6) << px << "," << py;
  }
  out << "\"/>\n";
  out << "  <text x=\"" << size / 2 << "\" y=\"" << size - 8
      << "\" text-anchor=\"middle\" font-size=\"12\">false positive "
         "rate</text>\n";
  out << "  <text x=\"12\" y=\"" << size / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 "
         "12 "
      << size / 2 << ")\">true positive rate</text>\n";
  out << "</svg>\n";
  return out.str();
}

void WriteRocSvgFile(const std::string &path, const ProvenanceHeader &header,
                     const std::vector<RocPoint> &points) {
  WriteTextFile(path, FormatRocSvg(header, points));
}

std::string ReadTextFile(const std::string &path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) throw FormatError("cannot open file: " + path);
  std::ostringstream out;
  out << stream.rdbuf();
  return out.str();
}

void WriteTextFile(const std::string &path, const std::string &text) {
  std::ofstream stream(path, std::ios::binary);
  if (!stream) throw FormatError("cannot write file: " + path);
  stream << text;
  if (!stream) throw FormatError("write failed: " + path);
}

}  // namespace facevox
