// src/model_io.cpp

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

#include "facevox/model_io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "facevox/error.hpp"

namespace facevox {

namespace {

const char kMagic[4] = {'B', 'M', 'I', 'D'};

class BlobWriter {
 public:
  explicit BlobWriter(BlobKind kind) {
    bytes_.insert(bytes_.end(), kMagic, kMagic + 4);
    PutU32(kBlobFormatVersion);
    PutU8(uint8_t(kind));
  }

  void PutU8(uint8_t v) { bytes_.push_back(v); }

  void PutU32(uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(uint8_t(v >> (8 * i)));
  }

  void PutI32(int32_t v) { PutU32(uint32_t(v)); }

  void PutU64(uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(uint8_t(v >> (8 * i)));
  }

  void PutDouble(double v) {
    uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(bits));
    PutU64(bits);
  }

  void PutVector(const Eigen::VectorXd &v) {
    PutI32(int32_t(v.size()));
    for (int i = 0; i < v.size(); ++i) PutDouble(v(i));
  }

  void PutMatrix(const Eigen::MatrixXd &m) {
    PutI32(int32_t(m.rows()));
    PutI32(int32_t(m.cols()));
    for (int r = 0; r < m.rows(); ++r) {
      for (int c = 0; c < m.cols(); ++c) PutDouble(m(r, c));
    }
  }

  std::vector<uint8_t> Take() { return std::move(bytes_); }

 private:
  std::vector<uint8_t> bytes_;
};

class BlobReader {
 public:
  BlobReader(const std::vector<uint8_t> &bytes, BlobKind expected)
      : bytes_(bytes) {
    if (bytes_.size() < 9) throw IntegrityError("blob: truncated header");
    if (std::memcmp(bytes_.data(), kMagic, 4) != 0) {
      throw FormatError("blob: bad magic");
    }
    position_ = 4;
    const uint32_t version = TakeU32();
    if (version != kBlobFormatVersion) {
      throw VersionError("blob: unsupported format version " +
                         std::to_string(version));
    }
    const uint8_t kind = TakeU8();
    if (kind != uint8_t(expected)) {
      throw FormatError("blob: payload kind mismatch");
    }
  }

  uint8_t TakeU8() {
    Need(1);
    return bytes_[position_++];
  }

  uint32_t TakeU32() {
    Need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(bytes_[position_++]) << (8 * i);
    return v;
  }

  int32_t TakeI32() { return int32_t(TakeU32()); }

  uint64_t TakeU64() {
    Need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(bytes_[position_++]) << (8 * i);
    return v;
  }

  double TakeDouble() {
    const uint64_t bits = TakeU64();
    double v = 0.0;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }

  Eigen::VectorXd TakeVector() {
    const int32_t size = TakeI32();
    if (size < 0) throw IntegrityError("blob: negative vector size");
    Eigen::VectorXd v(size);
    for (int i = 0; i < size; ++i) v(i) = TakeDouble();
    return v;
  }

  Eigen::MatrixXd TakeMatrix() {
    const int32_t rows = TakeI32();
    const int32_t cols = TakeI32();
    if (rows < 0 || cols < 0) {
      throw IntegrityError("blob: negative matrix size");
    }
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) m(r, c) = TakeDouble();
    }
    return m;
  }

  void Finish() const {
    if (position_ != bytes_.size()) {
      throw IntegrityError("blob: trailing bytes");
    }
  }

 private:
  void Need(size_t n) const {
    if (position_ + n > bytes_.size()) {
      throw IntegrityError("blob: truncated payload");
    }
  }

  const std::vector<uint8_t> &bytes_;
  size_t position_ = 0;
};

}  // namespace

BlobKind PeekBlobKind(const std::vector<uint8_t> &bytes) {
  if (bytes.size() < 9) throw IntegrityError("blob: truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("blob: bad magic");
  }
  const uint8_t kind = bytes[8];
  if (kind > uint8_t(BlobKind::kPca)) {
    throw FormatError("blob: unknown payload kind");
  }
  return BlobKind(kind);
}

std::vector<uint8_t> SerializeGmm(const GmmModel &model) {
  BlobWriter writer(BlobKind::kGmm);
  writer.PutVector(model.weights);
  writer.PutMatrix(model.means);
  writer.PutMatrix(model.variances);
  return writer.Take();
}

GmmModel DeserializeGmm(const std::vector<uint8_t> &bytes) {
  BlobReader reader(bytes, BlobKind::kGmm);
  GmmModel model;
  model.weights = reader.TakeVector();
  model.means = reader.TakeMatrix();
  model.variances = reader.TakeMatrix();
  reader.Finish();
  return model;
}

std::vector<uint8_t> SerializeTotalVariability(
    const TotalVariabilitySpace &space) {
  BlobWriter writer(BlobKind::kTotalVariability);
  writer.PutI32(space.components);
  writer.PutI32(space.dim);
  writer.PutI32(space.rank);
  writer.PutMatrix(space.t);
  writer.PutVector(space.sigma);
  return writer.Take();
}

TotalVariabilitySpace DeserializeTotalVariability(
    const std::vector<uint8_t> &bytes) {
  BlobReader reader(bytes, BlobKind::kTotalVariability);
  TotalVariabilitySpace space;
  space.components = reader.TakeI32();
  space.dim = reader.TakeI32();
  space.rank = reader.TakeI32();
  space.t = reader.TakeMatrix();
  space.sigma = reader.TakeVector();
  reader.Finish();
  return space;
}

std::vector<uint8_t> SerializeNetwork(const LayeredNetwork &net) {
  BlobWriter writer(BlobKind::kNetwork);
  writer.PutI32(net.input_shape.channels);
  writer.PutI32(net.input_shape.height);
  writer.PutI32(net.input_shape.width);
  writer.PutI32(int32_t(net.layers.size()));
  for (const Layer &layer : net.layers) {
    if (const auto *dense = std::get_if<DenseLayer>(&layer)) {
      writer.PutU8(0);
      writer.PutU8(uint8_t(dense->activation));
      writer.PutMatrix(dense->weights);
      writer.PutVector(dense->bias);
    } else if (const auto *conv = std::get_if<Conv2dLayer>(&layer)) {
      writer.PutU8(1);
      writer.PutU8(uint8_t(conv->activation));
      writer.PutI32(conv->in_channels);
      writer.PutI32(conv->out_channels);
      writer.PutI32(conv->kernel);
      writer.PutMatrix(conv->kernels);
      writer.PutVector(conv->bias);
    } else {
      const auto &pool = std::get<MaxPool2dLayer>(layer);
      writer.PutU8(2);
      writer.PutI32(pool.window);
    }
  }
  return writer.Take();
}

LayeredNetwork DeserializeNetwork(const std::vector<uint8_t> &bytes) {
  BlobReader reader(bytes, BlobKind::kNetwork);
  LayeredNetwork net;
  net.input_shape.channels = reader.TakeI32();
  net.input_shape.height = reader.TakeI32();
  net.input_shape.width = reader.TakeI32();
  const int32_t n_layers = reader.TakeI32();
  if (n_layers < 0) throw IntegrityError("blob: negative layer count");
  for (int32_t i = 0; i < n_layers; ++i) {
    const uint8_t tag = reader.TakeU8();
    if (tag == 0) {
      DenseLayer dense;
      dense.activation = Activation(reader.TakeU8());
      dense.weights = reader.TakeMatrix();
      dense.bias = reader.TakeVector();
      net.layers.emplace_back(std::move(dense));
    } else if (tag == 1) {
      Conv2dLayer conv;
      conv.activation = Activation(reader.TakeU8());
      conv.in_channels = reader.TakeI32();
      conv.out_channels = reader.TakeI32();
      conv.kernel = reader.TakeI32();
      conv.kernels = reader.TakeMatrix();
      conv.bias = reader.TakeVector();
      net.layers.emplace_back(std::move(conv));
    } else if (tag == 2) {
      MaxPool2dLayer pool;
      pool.window = reader.TakeI32();
      net.layers.emplace_back(pool);
    } else {
      throw FormatError("blob: unknown layer tag");
    }
  }
  reader.Finish();
  return net;
}

std::vector<uint8_t> SerializeDetector(const HaarDetector &detector) {
  BlobWriter writer(BlobKind::kDetector);
  writer.PutI32(detector.window_size);
  writer.PutI32(int32_t(detector.features.size()));
  for (const HaarFeature &feature : detector.features) {
    writer.PutU8(feature.kind == HaarKind::kHorizontalPair ? 0 : 1);
    writer.PutI32(feature.x);
    writer.PutI32(feature.y);
    writer.PutI32(feature.width);
    writer.PutI32(feature.height);
  }
  writer.PutI32(int32_t(detector.classifier.stumps.size()));
  for (const DecisionStump &stump : detector.classifier.stumps) {
    writer.PutI32(stump.feature);
    writer.PutDouble(stump.threshold);
    writer.PutI32(stump.polarity);
    writer.PutDouble(stump.weight);
  }
  return writer.Take();
}

HaarDetector DeserializeDetector(const std::vector<uint8_t> &bytes) {
  BlobReader reader(bytes, BlobKind::kDetector);
  HaarDetector detector;
  detector.window_size = reader.TakeI32();
  const int32_t n_features = reader.TakeI32();
  if (n_features < 0) throw IntegrityError("blob: negative feature count");
  for (int32_t i = 0; i < n_features; ++i) {
    HaarFeature feature;
    feature.kind = reader.TakeU8() == 0 ? HaarKind::kHorizontalPair
                                        : HaarKind::kVerticalPair;
    feature.x = reader.TakeI32();
    feature.y = reader.TakeI32();
    feature.width = reader.TakeI32();
    feature.height = reader.TakeI32();
    detector.features.push_back(feature);
  }
  const int32_t n_stumps = reader.TakeI32();
  if (n_stumps < 0) throw IntegrityError("blob: negative stump count");
  for (int32_t i = 0; i < n_stumps; ++i) {
    DecisionStump stump;
    stump.feature = reader.TakeI32();
    stump.threshold = reader.TakeDouble();
    stump.polarity = reader.TakeI32();
    stump.weight = reader.TakeDouble();
    detector.classifier.stumps.push_back(stump);
  }
  reader.Finish();
  return detector;
}

std::vector<uint8_t> SerializeSdm(const SdmModel &model) {
  BlobWriter writer(BlobKind::kSdm);
  writer.PutI32(model.n_landmarks);
  writer.PutI32(model.patch_radius);
  writer.PutVector(model.mean_shape);
  writer.PutI32(int32_t(model.stages.size()));
  for (const SdmStage &stage : model.stages) {
    writer.PutMatrix(stage.map);
    writer.PutVector(stage.offset);
  }
  return writer.Take();
}

SdmModel DeserializeSdm(const std::vector<uint8_t> &bytes) {
  BlobReader reader(bytes, BlobKind::kSdm);
  SdmModel model;
  model.n_landmarks = reader.TakeI32();
  model.patch_radius = reader.TakeI32();
  model.mean_shape = reader.TakeVector();
  const int32_t n_stages = reader.TakeI32();
  if (n_stages < 0) throw IntegrityError("blob: negative stage count");
  for (int32_t i = 0; i < n_stages; ++i) {
    SdmStage stage;
    stage.map = reader.TakeMatrix();
    stage.offset = reader.TakeVector();
    model.stages.push_back(std::move(stage));
  }
  reader.Finish();
  return model;
}

std::vector<uint8_t> SerializePca(const PcaModel &model) {
  BlobWriter writer(BlobKind::kPca);
  writer.PutVector(model.mean);
  writer.PutMatrix(model.components);
  writer.PutVector(model.eigenvalues);
  return writer.Take();
}

PcaModel DeserializePca(const std::vector<uint8_t> &bytes) {
  BlobReader reader(bytes, BlobKind::kPca);
  PcaModel model;
  model.mean = reader.TakeVector();
  model.components = reader.TakeMatrix();
  model.eigenvalues = reader.TakeVector();
  reader.Finish();
  return model;
}

std::vector<uint8_t> ReadBlobFile(const std::string &path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) throw FormatError("cannot open file: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(stream)),
                             std::istreambuf_iterator<char>());
  // The payload magic never starts with '#', so a leading '#' can only be
  // the provenance line.
  if (!bytes.empty() && bytes[0] == '#') {
    auto eol = std::find(bytes.begin(), bytes.end(), uint8_t('\n'));
    if (eol != bytes.end()) ++eol;
    bytes.erase(bytes.begin(), eol);
  }
  return bytes;
}

void WriteBlobFile(const std::string &path,
                   const std::vector<uint8_t> &bytes) {
  std::ofstream stream(path, std::ios::binary);
  if (!stream) throw FormatError("cannot write file: " + path);
  stream.write(reinterpret_cast<const char *>(bytes.data()),
               std::streamsize(bytes.size()));
  if (!stream) throw FormatError("write failed: " + path);
}

void WriteBlobFile(const std::string &path, const std::vector<uint8_t> &bytes,
                   const ProvenanceHeader &header) {
  const std::string line = FormatProvenance(header) + "\n";
  std::vector<uint8_t> out(line.begin(), line.end());
  out.insert(out.end(), bytes.begin(), bytes.end());
  WriteBlobFile(path, out);
}

}  // namespace facevox
