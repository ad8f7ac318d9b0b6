// src/pipeline.cpp

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

#include "facevox/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <set>
#include <sstream>

#include "facevox/convnet.hpp"
#include "facevox/csv.hpp"
#include "facevox/error.hpp"
#include "facevox/face_align.hpp"
#include "facevox/face_detect.hpp"
#include "facevox/fusion.hpp"
#include "facevox/gmm.hpp"
#include "facevox/ivector.hpp"
#include "facevox/mfcc.hpp"
#include "facevox/model_io.hpp"
#include "facevox/pgm.hpp"
#include "facevox/plp.hpp"
#include "facevox/rbm.hpp"
#include "facevox/rng.hpp"
#include "facevox/wav.hpp"

namespace facevox {

namespace {

constexpr uint64_t kFnvOffset = 14695981039346656037ull;
constexpr uint64_t kFnvPrime = 1099511628211ull;

uint64_t Fnv1a(uint64_t hash, const std::string &text) {
  for (char c : text) {
    hash ^= uint64_t(uint8_t(c));
    hash *= kFnvPrime;
  }
  return hash;
}

std::string TrimCopy(const std::string &s) {
  size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

bool SplitMatches(Split split, const std::string &filter) {
  if (filter.empty() || filter == "all") return true;
  if (filter == "train") return split == Split::kTrain;
  if (filter == "train_test") return split == Split::kTrainTest;
  if (filter == "test") return split == Split::kTest;
  throw ParameterError("unknown split filter: " + filter);
}

std::string KeyToFileName(const std::string &key) {
  std::string name = key;
  std::replace(name.begin(), name.end(), '/', '_');
  return name;
}

std::string SubjectOfKey(const std::string &key) {
  const size_t slash = key.find('/');
  if (slash == std::string::npos || slash == 0) {
    throw FormatError("bad sample key: " + key);
  }
  return key.substr(0, slash);
}

ProvenanceHeader MakeHeader(const std::string &command,
                            const PipelineConfig &config) {
  return ProvenanceHeader{command, config.Hash(), config.Seed()};
}

OptimizerKind ParseOptimizerKind(const std::string &name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adagrad") return OptimizerKind::kAdaGrad;
  if (name == "rmsprop") return OptimizerKind::kRmsProp;
  throw ParameterError("unknown optimizer: " + name);
}

TrainingOptions TrainOptionsFromConfig(const PipelineConfig &config) {
  TrainingOptions options;
  options.optimizer.kind =
      ParseOptimizerKind(config.GetString("train.optimizer"));
  options.optimizer.learning_rate = config.GetDouble("train.lr");
  options.optimizer.decay_gamma = config.GetDouble("train.decay_gamma");
  options.optimizer.decay_step = config.GetInt("train.decay_step");
  options.optimizer.rho = config.GetDouble("train.rho");
  options.optimizer.delta = config.GetDouble("train.delta");
  options.regularizers.l2 = config.GetDouble("train.l2");
  options.regularizers.l1 = config.GetDouble("train.l1");
  options.loss = LossKind::kCrossEntropy;
  options.dropout_rate = config.GetDouble("train.dropout");
  options.epochs = config.GetInt("train.epochs");
  options.batch_size = config.GetInt("train.batch");
  options.seed = config.Seed();
  return options;
}

AcousticFeatureSequence MfccOfAudio(const PipelineConfig &config,
                                    const AudioBuffer &audio) {
  const std::vector<double> emphasized =
      PreEmphasize(audio.samples, config.GetDouble("mfcc.pre_emphasis"));
  const FrameMatrix frames =
      FrameSignal(emphasized, audio.sample_rate,
                  config.GetDouble("mfcc.frame_ms"),
                  config.GetDouble("mfcc.hop_ms"));
  const HammingVariant variant = config.GetBool("mfcc.flipped_window")
                                     ? HammingVariant::kFlippedSign
                                     : HammingVariant::kStandard;
  const PowerSpectrumMatrix power =
      ComputePowerSpectrum(ApplyHamming(frames, variant));
  double high = config.GetDouble("mfcc.high_hz");
  if (high <= 0.0) high = audio.sample_rate / 2.0;
  const MelFilterbank bank = BuildMelFilterbank(
      config.GetInt("mfcc.n_filters"), power.fft_size, audio.sample_rate,
      config.GetDouble("mfcc.low_hz"), high);
  const FilterDomain domain = config.GetBool("mfcc.power_domain")
                                  ? FilterDomain::kPower
                                  : FilterDomain::kMagnitude;
  const AcousticFeatureSequence cepstra =
      MfccFromPower(power, bank, config.GetInt("mfcc.n_cepstra"), domain);
  return AppendDeltasAndEnergy(cepstra, frames,
                               config.GetInt("mfcc.delta_window"));
}

AcousticFeatureSequence PlpOfAudio(const PipelineConfig &config,
                                   const AudioBuffer &audio) {
  const std::vector<double> emphasized =
      PreEmphasize(audio.samples, config.GetDouble("plp.pre_emphasis"));
  const FrameMatrix frames = FrameSignal(emphasized, audio.sample_rate,
                                         config.GetDouble("plp.frame_ms"),
                                         config.GetDouble("plp.hop_ms"));
  const PowerSpectrumMatrix power = ComputePowerSpectrum(ApplyHamming(frames));
  return PlpFeatures(power, config.GetInt("plp.order"));
}

using FeatureFn = AcousticFeatureSequence (*)(const PipelineConfig &,
                                              const AudioBuffer &);

void ExtractFeatureArchive(const PipelineConfig &config,
                           const std::string &command,
                           const std::string &kind, FeatureFn features,
                           const std::string &manifest_path,
                           const std::string &output_path,
                           const std::string &split_filter) {
  const DatasetManifest manifest = ReadManifestFile(manifest_path);
  const auto keyed = KeyedEntries(manifest, Modality::kAudio, split_filter);
  if (keyed.empty()) {
    throw InsufficientDataError(command + ": no audio samples selected");
  }
  MatrixArchive archive;
  archive.header = MakeHeader(command, config);
  archive.kind = kind;
  for (const auto &[entry, key] : keyed) {
    const AudioBuffer audio = ReadWavFile(entry.path);
    archive.entries.push_back(NamedMatrix{
        key, features(config, audio).features});
  }
  WriteMatrixArchiveFile(output_path, archive);
}

std::vector<std::pair<std::string, Eigen::VectorXd>> ArchiveVectors(
    const MatrixArchive &archive) {
  std::vector<std::pair<std::string, Eigen::VectorXd>> vectors;
  for (const NamedMatrix &entry : archive.entries) {
    vectors.emplace_back(entry.key, FlattenFrames(entry.values));
  }
  return vectors;
}

Eigen::VectorXd NormalizeSegment(const Eigen::VectorXd &v,
                                 const std::string &key) {
  const double norm = v.norm();
  if (norm <= 0.0) {
    throw SingularityError("fuse: zero-length segment for " + key);
  }
  return v / norm;
}

std::vector<GrayImage> LoadWindows(const std::string &manifest_path,
                                   int window) {
  const DatasetManifest manifest = ReadManifestFile(manifest_path);
  std::vector<GrayImage> windows;
  for (const ManifestEntry &entry : manifest.entries) {
    if (entry.modality != Modality::kImage) continue;
    GrayImage img = ReadPgmFile(entry.path);
    if (img.width != window || img.height != window) {
      img = ResizeBilinear(img, window, window);
    }
    windows.push_back(std::move(img));
  }
  return windows;
}

}  // namespace

const std::map<std::string, std::string> &PipelineConfig::Defaults() {
  static const std::map<std::string, std::string> defaults = {
      {"seed", "0"},
      {"mfcc.frame_ms", "25"},
      {"mfcc.hop_ms", "20"},
      {"mfcc.pre_emphasis", "0.97"},
      {"mfcc.n_filters", "24"},
      {"mfcc.n_cepstra", "13"},
      {"mfcc.delta_window", "2"},
      {"mfcc.low_hz", "0"},
      {"mfcc.high_hz", "0"},
      {"mfcc.flipped_window", "0"},
      {"mfcc.power_domain", "0"},
      {"plp.frame_ms", "25"},
      {"plp.hop_ms", "20"},
      {"plp.pre_emphasis", "0"},
      {"plp.order", "12"},
      {"ubm.components", "16"},
      {"ubm.iterations", "10"},
      {"tv.rank", "8"},
      {"tv.iterations", "5"},
      {"tv.literal_accumulator", "0"},
      {"detector.window", "16"},
      {"detector.rounds", "10"},
      {"detector.min_size", "4"},
      {"detector.size_step", "4"},
      {"detector.position_step", "2"},
      {"detector.scale_factor", "1.25"},
      {"detector.scan_step", "2"},
      {"detector.overlap", "0.3"},
      {"sdm.stages", "4"},
      {"sdm.patch_radius", "5"},
      {"sdm.ridge", "1e-6"},
      {"face.size", "32"},
      {"face.conv_channels", "8"},
      {"face.trunk_units", "64"},
      {"face.embedding_dim", "16"},
      {"train.optimizer", "sgd"},
      {"train.lr", "0.1"},
      {"train.decay_gamma", "1"},
      {"train.decay_step", "0"},
      {"train.rho", "0.9"},
      {"train.delta", "1e-7"},
      {"train.l2", "0"},
      {"train.l1", "0"},
      {"train.dropout", "0"},
      {"train.epochs", "5"},
      {"train.batch", "8"},
      {"pca.components", "16"},
      {"pca.resample_frames", "100"},
      {"dbn.widths", "64"},
      {"dbn.pretrain_epochs", "5"},
      {"dbn.pretrain_lr", "0.1"},
      {"dbn.batch", "8"},
      {"dbn.epochs", "5"},
      {"dbn.lr", "0.1"},
      {"fuse.normalize", "1"},
  };
  return defaults;
}

PipelineConfig PipelineConfig::FromFile(const std::string &path) {
  return FromText(ReadTextFile(path));
}

PipelineConfig PipelineConfig::FromText(const std::string &text) {
  PipelineConfig config;
  std::istringstream stream(text);
  std::string line;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const std::string trimmed = TrimCopy(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const size_t eq = trimmed.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw FormatError("config: expected key=value at line " +
                        std::to_string(line_number));
    }
    config.Set(TrimCopy(trimmed.substr(0, eq)),
               TrimCopy(trimmed.substr(eq + 1)));
  }
  return config;
}

void PipelineConfig::Set(const std::string &key, const std::string &value) {
  if (key.empty()) throw ParameterError("config: empty key");
  if (Defaults().find(key) == Defaults().end()) {
    throw ParameterError("config: unknown key '" + key + "'");
  }
  values_[key] = value;
}

void PipelineConfig::ApplyOverride(const std::string &assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ParameterError("config: override must be key=value, got '" +
                         assignment + "'");
  }
  Set(TrimCopy(assignment.substr(0, eq)), TrimCopy(assignment.substr(eq + 1)));
}

std::string PipelineConfig::GetString(const std::string &key) const {
  const auto it = values_.find(key);
  if (it != values_.end()) return it->second;
  const auto &defaults = Defaults();
  const auto def = defaults.find(key);
  if (def != defaults.end()) return def->second;
  throw ParameterError("config: unknown key " + key);
}

int PipelineConfig::GetInt(const std::string &key) const {
  const std::string value = GetString(key);
  int parsed = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), parsed);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ParameterError("config: " + key + " must be an integer, got '" +
                         value + "'");
  }
  return parsed;
}

double PipelineConfig::GetDouble(const std::string &key) const {
  const std::string value = GetString(key);
  char *end = nullptr;
  const double parsed = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw ParameterError("config: " + key + " must be a number, got '" +
                         value + "'");
  }
  return parsed;
}

bool PipelineConfig::GetBool(const std::string &key) const {
  const std::string value = GetString(key);
  if (value == "1" || value == "true" || value == "on") return true;
  if (value == "0" || value == "false" || value == "off") return false;
  throw ParameterError("config: " + key + " must be a boolean, got '" +
                       value + "'");
}

std::vector<int> PipelineConfig::GetIntList(const std::string &key) const {
  const std::string value = GetString(key);
  std::vector<int> list;
  std::istringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const std::string trimmed = TrimCopy(item);
    int parsed = 0;
    const auto [ptr, ec] = std::from_chars(
        trimmed.data(), trimmed.data() + trimmed.size(), parsed);
    if (ec != std::errc() || ptr != trimmed.data() + trimmed.size()) {
      throw ParameterError("config: " + key + " must list integers, got '" +
                           value + "'");
    }
    list.push_back(parsed);
  }
  if (list.empty()) {
    throw ParameterError("config: " + key + " must not be empty");
  }
  return list;
}

uint64_t PipelineConfig::Seed() const {
  const std::string value = GetString("seed");
  uint64_t parsed = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), parsed);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ParameterError("config: seed must be a non-negative integer");
  }
  return parsed;
}

uint64_t PipelineConfig::Hash() const {
  std::map<std::string, std::string> resolved = Defaults();
  for (const auto &[key, value] : values_) resolved[key] = value;
  uint64_t hash = kFnvOffset;
  for (const auto &[key, value] : resolved) {
    hash = Fnv1a(hash, key);
    hash = Fnv1a(hash, "=");
    hash = Fnv1a(hash, value);
    hash = Fnv1a(hash, "\n");
  }
  return hash;
}

int MfccFeatureDim(const PipelineConfig &config) {
  return 3 * config.GetInt("mfcc.n_cepstra") + 1;
}

int PlpFeatureDim(const PipelineConfig &config) {
  return config.GetInt("plp.order") + 1;
}

int IvectorDim(const PipelineConfig &config) {
  return config.GetInt("tv.rank");
}

int PlpPcaDim(const PipelineConfig &config) {
  return config.GetInt("pca.components");
}

int SpeechSegmentDim(const PipelineConfig &config) {
  return IvectorDim(config) + PlpPcaDim(config);
}

int FaceSegmentDim(const PipelineConfig &config) {
  return config.GetInt("face.embedding_dim");
}

int FusedDim(const PipelineConfig &config) {
  return FaceSegmentDim(config) + SpeechSegmentDim(config);
}

std::vector<std::pair<ManifestEntry, std::string>> KeyedEntries(
    const DatasetManifest &manifest, Modality modality,
    const std::string &split_filter) {
  std::map<std::string, int> ordinals;
  std::vector<std::pair<ManifestEntry, std::string>> keyed;
  for (const ManifestEntry &entry : manifest.entries) {
    if (entry.modality != modality) continue;
    const int ordinal = ordinals[entry.subject_id]++;
    if (!SplitMatches(entry.split, split_filter)) continue;
    keyed.emplace_back(entry,
                       entry.subject_id + "/" + std::to_string(ordinal));
  }
  return keyed;
}

void CommandExtractMfcc(const PipelineConfig &config,
                        const std::string &manifest_path,
                        const std::string &output_path,
                        const std::string &split_filter) {
  ExtractFeatureArchive(config, "extract-mfcc", "mfcc", &MfccOfAudio,
                        manifest_path, output_path, split_filter);
}

void CommandExtractPlp(const PipelineConfig &config,
                       const std::string &manifest_path,
                       const std::string &output_path,
                       const std::string &split_filter) {
  ExtractFeatureArchive(config, "extract-plp", "plp", &PlpOfAudio,
                        manifest_path, output_path, split_filter);
}

void CommandTrainUbm(const PipelineConfig &config,
                     const std::string &features_path,
                     const std::string &output_path) {
  const MatrixArchive archive = ReadMatrixArchiveFile(features_path);
  if (archive.entries.empty()) {
    throw InsufficientDataError("train-ubm: empty feature archive");
  }
  long total = 0;
  const long dim = archive.entries.front().values.cols();
  for (const NamedMatrix &entry : archive.entries) {
    if (entry.values.cols() != dim) {
      throw FormatError("train-ubm: inconsistent feature width");
    }
    total += entry.values.rows();
  }
  Eigen::MatrixXd data(total, dim);
  long row = 0;
  for (const NamedMatrix &entry : archive.entries) {
    data.middleRows(row, entry.values.rows()) = entry.values;
    row += entry.values.rows();
  }
  const GmmModel ubm =
      TrainGmmEm(data, config.GetInt("ubm.components"),
                 config.GetInt("ubm.iterations"), config.Seed());
  WriteBlobFile(output_path, SerializeGmm(ubm),
                MakeHeader("train-ubm", config));
}

void CommandTrainTv(const PipelineConfig &config,
                    const std::string &features_path,
                    const std::string &ubm_path,
                    const std::string &output_path) {
  const GmmModel ubm = DeserializeGmm(ReadBlobFile(ubm_path));
  const MatrixArchive archive = ReadMatrixArchiveFile(features_path);
  if (archive.entries.empty()) {
    throw InsufficientDataError("train-tv: empty feature archive");
  }
  std::vector<BaumWelchStats> stats;
  for (const NamedMatrix &entry : archive.entries) {
    stats.push_back(AccumulateBaumWelch(ubm, entry.values));
  }
  TvTrainOptions options;
  options.iterations = config.GetInt("tv.iterations");
  options.seed = config.Seed();
  options.literal_accumulator = config.GetBool("tv.literal_accumulator");
  const TotalVariabilitySpace tv =
      TrainTotalVariability(stats, ubm, config.GetInt("tv.rank"), options);
  WriteBlobFile(output_path, SerializeTotalVariability(tv),
                MakeHeader("train-tv", config));
}

void CommandExtractIvector(const PipelineConfig &config,
                           const std::string &features_path,
                           const std::string &ubm_path,
                           const std::string &tv_path,
                           const std::string &output_path) {
  const GmmModel ubm = DeserializeGmm(ReadBlobFile(ubm_path));
  const TotalVariabilitySpace tv =
      DeserializeTotalVariability(ReadBlobFile(tv_path));
  const MatrixArchive archive = ReadMatrixArchiveFile(features_path);
  if (archive.entries.empty()) {
    throw InsufficientDataError("extract-ivector: empty feature archive");
  }
  MatrixArchive out;
  out.header = MakeHeader("extract-ivector", config);
  out.kind = "ivector";
  for (const NamedMatrix &entry : archive.entries) {
    const BaumWelchStats stats = AccumulateBaumWelch(ubm, entry.values);
    out.entries.push_back(
        NamedMatrix{entry.key, ExtractIvector(tv, stats).transpose()});
  }
  WriteMatrixArchiveFile(output_path, out);
}

void CommandTrainDetector(const PipelineConfig &config,
                          const std::string &positives_manifest,
                          const std::string &negatives_manifest,
                          const std::string &output_path) {
  HaarTrainOptions options;
  options.window_size = config.GetInt("detector.window");
  options.rounds = config.GetInt("detector.rounds");
  options.enumeration.min_size = config.GetInt("detector.min_size");
  options.enumeration.size_step = config.GetInt("detector.size_step");
  options.enumeration.position_step = config.GetInt("detector.position_step");
  const std::vector<GrayImage> positives =
      LoadWindows(positives_manifest, options.window_size);
  const std::vector<GrayImage> negatives =
      LoadWindows(negatives_manifest, options.window_size);
  const HaarDetector detector =
      TrainHaarDetector(positives, negatives, options);
  WriteBlobFile(output_path, SerializeDetector(detector),
                MakeHeader("train-detector", config));
}

void CommandDetect(const PipelineConfig &config,
                   const std::string &manifest_path,
                   const std::string &detector_path,
                   const std::string &output_path,
                   const std::string &split_filter) {
  const HaarDetector detector =
      DeserializeDetector(ReadBlobFile(detector_path));
  ScanOptions options;
  options.scale_factor = config.GetDouble("detector.scale_factor");
  options.step = config.GetInt("detector.scan_step");
  options.overlap_threshold = config.GetDouble("detector.overlap");
  const DatasetManifest manifest = ReadManifestFile(manifest_path);
  const auto keyed = KeyedEntries(manifest, Modality::kImage, split_filter);
  if (keyed.empty()) {
    throw InsufficientDataError("detect: no image samples selected");
  }
  MatrixArchive out;
  out.header = MakeHeader("detect", config);
  out.kind = "detections";
  for (const auto &[entry, key] : keyed) {
    const GrayImage img = ReadPgmFile(entry.path);
    const std::vector<Detection> hits = ScanDetect(img, detector, options);
    Eigen::MatrixXd rows(long(hits.size()), 5);
    for (size_t i = 0; i < hits.size(); ++i) {
      rows.row(long(i)) << hits[i].box.x, hits[i].box.y, hits[i].box.width,
          hits[i].box.height, hits[i].score;
    }
    out.entries.push_back(NamedMatrix{key, rows});
  }
  WriteMatrixArchiveFile(output_path, out);
}

void CommandTrainSdm(const PipelineConfig &config,
                     const std::string &manifest_path,
                     const std::string &landmarks_path,
                     const std::string &output_path) {
  const DatasetManifest manifest = ReadManifestFile(manifest_path);
  const auto keyed = KeyedEntries(manifest, Modality::kImage, "");
  const MatrixArchive landmarks = ReadMatrixArchiveFile(landmarks_path);
  std::map<std::string, Eigen::VectorXd> targets;
  for (const NamedMatrix &entry : landmarks.entries) {
    targets[entry.key] = FlattenFrames(entry.values);
  }
  std::vector<GrayImage> images;
  std::vector<Eigen::VectorXd> shapes;
  for (const auto &[entry, key] : keyed) {
    const auto it = targets.find(key);
    if (it == targets.end()) {
      throw FormatError("train-sdm: no landmarks for sample " + key);
    }
    images.push_back(ReadPgmFile(entry.path));
    shapes.push_back(it->second);
  }
  if (images.empty()) {
    throw InsufficientDataError("train-sdm: no image samples");
  }
  SdmTrainOptions options;
  options.n_stages = config.GetInt("sdm.stages");
  options.patch_radius = config.GetInt("sdm.patch_radius");
  options.ridge = config.GetDouble("sdm.ridge");
  const SdmModel model = SdmTrain(images, shapes, options);
  WriteBlobFile(output_path, SerializeSdm(model),
                MakeHeader("train-sdm", config));
}

void CommandAlign(const PipelineConfig &config,
                  const std::string &manifest_path,
                  const std::string &sdm_path, const std::string &out_dir,
                  const std::string &split_filter) {
  const SdmModel model = DeserializeSdm(ReadBlobFile(sdm_path));
  const DatasetManifest manifest = ReadManifestFile(manifest_path);
  const auto keyed = KeyedEntries(manifest, Modality::kImage, split_filter);
  if (keyed.empty()) {
    throw InsufficientDataError("align: no image samples selected");
  }
  std::filesystem::create_directories(out_dir);
  const int size = config.GetInt("face.size");
  DatasetManifest out_manifest;
  for (const auto &[entry, key] : keyed) {
    const GrayImage img = ReadPgmFile(entry.path);
    const Eigen::VectorXd shape = SdmPredict(model, img);
    const GrayImage aligned = AlignFace(img, shape, size);
    const std::string path = out_dir + "/" + KeyToFileName(key) + ".pgm";
    WritePgmFile(path, aligned, ProvenanceBody(MakeHeader("align", config)));
    out_manifest.entries.push_back(
        ManifestEntry{entry.subject_id, Modality::kImage, path, entry.split});
  }
  const std::string text = FormatProvenance(MakeHeader("align", config)) +
                           "\n" + FormatManifest(out_manifest);
  WriteTextFile(out_dir + "/manifest.csv", text);
}

void CommandTrainEmbedder(const PipelineConfig &config,
                          const std::string &manifest_path,
                          const std::string &output_path) {
  const DatasetManifest manifest = ReadManifestFile(manifest_path);
  const auto keyed = KeyedEntries(manifest, Modality::kImage, "train");
  if (keyed.empty()) {
    throw InsufficientDataError("train-embedder: no training images");
  }
  std::set<std::string> subject_set;
  for (const auto &[entry, key] : keyed) subject_set.insert(entry.subject_id);
  if (subject_set.size() < 2) {
    throw InsufficientDataError("train-embedder: need at least 2 subjects");
  }
  std::map<std::string, int> class_of;
  int next_class = 0;
  for (const std::string &subject : subject_set) {
    class_of[subject] = next_class++;
  }

  EmbedderConfig embedder;
  embedder.image_size = config.GetInt("face.size");
  embedder.conv_channels = config.GetInt("face.conv_channels");
  embedder.trunk_units = config.GetInt("face.trunk_units");
  embedder.embedding_dim = config.GetInt("face.embedding_dim");
  embedder.n_classes = int(subject_set.size());
  embedder.seed = config.Seed();
  LayeredNetwork net = MakeEmbedderNetwork(embedder);

  std::vector<GrayImage> images;
  std::vector<int> labels;
  for (const auto &[entry, key] : keyed) {
    GrayImage img = ReadPgmFile(entry.path);
    if (img.width != embedder.image_size ||
        img.height != embedder.image_size) {
      img = ResizeBilinear(img, embedder.image_size, embedder.image_size);
    }
    images.push_back(std::move(img));
    labels.push_back(class_of[entry.subject_id]);
  }
  TrainEmbedder(net, images, labels, embedder.n_classes,
                TrainOptionsFromConfig(config));
  WriteBlobFile(output_path, SerializeNetwork(net),
                MakeHeader("train-embedder", config));
}

void CommandEmbed(const PipelineConfig &config,
                  const std::string &manifest_path,
                  const std::string &network_path,
                  const std::string &output_path,
                  const std::string &split_filter) {
  const LayeredNetwork net = DeserializeNetwork(ReadBlobFile(network_path));
  const DatasetManifest manifest = ReadManifestFile(manifest_path);
  const auto keyed = KeyedEntries(manifest, Modality::kImage, split_filter);
  if (keyed.empty()) {
    throw InsufficientDataError("embed: no image samples selected");
  }
  MatrixArchive out;
  out.header = MakeHeader("embed", config);
  out.kind = "embedding";
  for (const auto &[entry, key] : keyed) {
    GrayImage img = ReadPgmFile(entry.path);
    if (img.width != net.input_shape.width ||
        img.height != net.input_shape.height) {
      img = ResizeBilinear(img, net.input_shape.width,
                           net.input_shape.height);
    }
    out.entries.push_back(
        NamedMatrix{key, ExtractEmbedding(net, img).transpose()});
  }
  WriteMatrixArchiveFile(output_path, out);
}

void CommandPcaFit(const PipelineConfig &config, const std::string &input_path,
                   const std::string &model_path,
                   const std::string &transformed_path) {
  const MatrixArchive archive = ReadMatrixArchiveFile(input_path);
  if (archive.entries.empty()) {
    throw InsufficientDataError("pca-fit: empty archive");
  }
  const int resample = config.GetInt("pca.resample_frames");
  std::vector<Eigen::VectorXd> flattened;
  for (const NamedMatrix &entry : archive.entries) {
    if (entry.values.rows() > 1) {
      flattened.push_back(
          FlattenFrames(ResampleFrames(entry.values, resample)));
    } else {
      flattened.push_back(FlattenFrames(entry.values));
    }
  }
  const long dim = flattened.front().size();
  Eigen::MatrixXd data(long(flattened.size()), dim);
  for (size_t i = 0; i < flattened.size(); ++i) {
    if (flattened[i].size() != dim) {
      throw FormatError("pca-fit: inconsistent sample widths");
    }
    data.row(long(i)) = flattened[i];
  }
  const PcaModel pca = PcaFit(data, config.GetInt("pca.components"));
  WriteBlobFile(model_path, SerializePca(pca), MakeHeader("pca-fit", config));

  if (!transformed_path.empty()) {
    MatrixArchive out;
    out.header = MakeHeader("pca-fit", config);
    out.kind = "pca";
    for (size_t i = 0; i < archive.entries.size(); ++i) {
      out.entries.push_back(
          NamedMatrix{archive.entries[i].key,
                      PcaTransform(pca, flattened[i]).transpose()});
    }
    WriteMatrixArchiveFile(transformed_path, out);
  }
}

void CommandFuse(const PipelineConfig &config, const std::string &face_path,
                 const std::string &ivector_path,
                 const std::string &plp_pca_path,
                 const std::string &output_path,
                 const std::string &speech_out_path) {
  const bool normalize = config.GetBool("fuse.normalize");
  const MatrixArchive face_archive = ReadMatrixArchiveFile(face_path);
  const MatrixArchive iv_archive = ReadMatrixArchiveFile(ivector_path);
  const MatrixArchive plp_archive = ReadMatrixArchiveFile(plp_pca_path);

  std::map<std::string, Eigen::VectorXd> plp_of;
  for (const auto &[key, vec] : ArchiveVectors(plp_archive)) plp_of[key] = vec;

  // Speech segment per speech sample: i-vector and projected spectral
  // envelope back to back, in i-vector archive order.
  std::vector<std::pair<std::string, Eigen::VectorXd>> speech;
  for (const auto &[key, vec] : ArchiveVectors(iv_archive)) {
    const auto it = plp_of.find(key);
    if (it == plp_of.end()) {
      throw FormatError("fuse: sample " + key + " missing from " +
                        plp_pca_path);
    }
    Eigen::VectorXd segment = SerialFuse(vec, it->second);
    if (normalize) segment = NormalizeSegment(segment, key);
    speech.emplace_back(key, std::move(segment));
  }

  if (!speech_out_path.empty()) {
    MatrixArchive out;
    out.header = MakeHeader("fuse", config);
    out.kind = "speech";
    for (const auto &[key, vec] : speech) {
      out.entries.push_back(NamedMatrix{key, vec.transpose()});
    }
    WriteMatrixArchiveFile(speech_out_path, out);
  }

  std::map<std::string, std::vector<Eigen::VectorXd>> face_by_subject;
  for (const auto &[key, vec] : ArchiveVectors(face_archive)) {
    Eigen::VectorXd segment = vec;
    if (normalize) segment = NormalizeSegment(segment, key);
    face_by_subject[SubjectOfKey(key)].push_back(std::move(segment));
  }
  std::map<std::string, std::vector<Eigen::VectorXd>> speech_by_subject;
  for (const auto &[key, vec] : speech) {
    speech_by_subject[SubjectOfKey(key)].push_back(vec);
  }

  // Per subject, faces and utterances are shuffled once and paired in
  // shuffled order; leftovers of the longer side are dropped.
  Rng rng(config.Seed());
  MatrixArchive fused;
  fused.header = MakeHeader("fuse", config);
  fused.kind = "fused";
  for (const auto &[subject, faces] : face_by_subject) {
    const auto it = speech_by_subject.find(subject);
    if (it == speech_by_subject.end()) continue;
    const std::vector<Eigen::VectorXd> &utterances = it->second;
    const std::vector<int> face_order = rng.Permutation(int(faces.size()));
    const std::vector<int> speech_order =
        rng.Permutation(int(utterances.size()));
    const size_t pairs = std::min(faces.size(), utterances.size());
    for (size_t i = 0; i < pairs; ++i) {
      const Eigen::VectorXd vec = SerialFuse(faces[size_t(face_order[i])],
                                             utterances[size_t(speech_order[i])]);
      fused.entries.push_back(NamedMatrix{
          subject + "/" + std::to_string(i), vec.transpose()});
    }
  }
  if (fused.entries.empty()) {
    throw InsufficientDataError("fuse: no subject has both modalities");
  }
  WriteMatrixArchiveFile(output_path, fused);
}

void CommandTrainDbn(const PipelineConfig &config,
                     const std::string &input_path,
                     const std::string &output_path) {
  const MatrixArchive archive = ReadMatrixArchiveFile(input_path);
  const auto vectors = ArchiveVectors(archive);
  if (vectors.size() < 2) {
    throw InsufficientDataError("train-dbn: need at least 2 samples");
  }
  std::set<std::string> subject_set;
  for (const auto &[key, vec] : vectors) subject_set.insert(SubjectOfKey(key));
  if (subject_set.size() < 2) {
    throw InsufficientDataError("train-dbn: need at least 2 subjects");
  }
  std::map<std::string, int> class_of;
  int next_class = 0;
  for (const std::string &subject : subject_set) {
    class_of[subject] = next_class++;
  }
  const long dim = vectors.front().second.size();
  Eigen::MatrixXd data(long(vectors.size()), dim);
  Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(long(vectors.size()),
                                                  long(subject_set.size()));
  for (size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].second.size() != dim) {
      throw FormatError("train-dbn: inconsistent sample widths");
    }
    data.row(long(i)) = vectors[i].second;
    targets(long(i), class_of[SubjectOfKey(vectors[i].first)]) = 1.0;
  }

  DbnPretrainOptions pretrain;
  pretrain.epochs = config.GetInt("dbn.pretrain_epochs");
  pretrain.batch_size = config.GetInt("dbn.batch");
  pretrain.learning_rate = config.GetDouble("dbn.pretrain_lr");
  pretrain.seed = config.Seed();
  const DbnStack stack =
      PretrainDbn(data, config.GetIntList("dbn.widths"), pretrain);

  TrainingOptions fine = TrainOptionsFromConfig(config);
  fine.optimizer.learning_rate = config.GetDouble("dbn.lr");
  fine.epochs = config.GetInt("dbn.epochs");
  fine.batch_size = config.GetInt("dbn.batch");
  const LayeredNetwork net = FineTuneDbn(stack, data, targets, fine, nullptr);
  WriteBlobFile(output_path, SerializeNetwork(net),
                MakeHeader("train-dbn", config));
}

void CommandScoreTrials(const PipelineConfig &config,
                        const std::string &vectors_path,
                        const std::string &trials_path,
                        const std::string &scores_path) {
  const MatrixArchive archive = ReadMatrixArchiveFile(vectors_path);
  std::map<std::string, Eigen::VectorXd> vector_of;
  for (const auto &[key, vec] : ArchiveVectors(archive)) vector_of[key] = vec;
  const std::vector<TrialPair> pairs = ReadTrialCsvFile(trials_path);
  std::vector<double> scores;
  for (const TrialPair &pair : pairs) {
    const auto a = vector_of.find(pair.id_a);
    const auto b = vector_of.find(pair.id_b);
    if (a == vector_of.end() || b == vector_of.end()) {
      throw FormatError("score-trials: unknown sample key " +
                        (a == vector_of.end() ? pair.id_a : pair.id_b));
    }
    scores.push_back(CosineScore(a->second, b->second));
  }
  WriteScoreCsvFile(scores_path, MakeHeader("score-trials", config), pairs,
                    scores);
}

void CommandRoc(const PipelineConfig &config, const std::string &scores_path,
                const std::string &roc_path, const std::string &svg_path,
                std::ostream &summary) {
  const auto rows = ReadScoreCsvFile(scores_path);
  std::vector<Trial> trials;
  for (const auto &[pair, score] : rows) {
    trials.push_back(Trial{score, pair.label == 1});
  }
  const std::vector<RocPoint> roc = ComputeRoc(trials);
  const EerResult eer = ComputeEer(roc);
  if (!roc_path.empty()) {
    WriteRocCsvFile(roc_path, MakeHeader("roc", config), roc);
  }
  if (!svg_path.empty()) {
    WriteRocSvgFile(svg_path, MakeHeader("roc", config), roc);
  }
  summary << std::setprecision(6) << "eer=" << eer.eer
          << " exact=" << (eer.exact ? 1 : 0) << " trials=" << trials.size()
          << "\n";
}

int ExitCodeForCurrentException() {
  try {
    throw;
  } catch (const ParameterError &) {
    return 1;
  } catch (const FormatError &) {
    return 2;
  } catch (const InsufficientDataError &) {
    return 2;
  } catch (const SingularityError &) {
    return 3;
  } catch (const Error &) {
    return 3;
  } catch (const std::exception &) {
    return 3;
  }
}

}  // namespace facevox
