// include/facevox/pipeline.hpp

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

#ifndef FACEVOX_PIPELINE_HPP_
#define FACEVOX_PIPELINE_HPP_

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "facevox/manifest.hpp"

namespace facevox {

// Flat key=value configuration with module-namespaced keys
// (mfcc.n_cepstra, ubm.components, ...). Every key has a built-in
// default sized for quick desk runs; files and overrides replace them.
class PipelineConfig {
 public:
  static const std::map<std::string, std::string> &Defaults();

  static PipelineConfig FromFile(const std::string &path);
  static PipelineConfig FromText(const std::string &text);

  void Set(const std::string &key, const std::string &value);
  // Accepts "key=value".
  void ApplyOverride(const std::string &assignment);

  std::string GetString(const std::string &key) const;
  int GetInt(const std::string &key) const;
  double GetDouble(const std::string &key) const;
  bool GetBool(const std::string &key) const;
  std::vector<int> GetIntList(const std::string &key) const;
  uint64_t Seed() const;

  // FNV-1a over the resolved configuration (defaults merged with
  // explicit values), in sorted key order.
  uint64_t Hash() const;

  const std::map<std::string, std::string> &Values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Feature-vector widths implied by a configuration, with no data
// involved; lets paper-scale settings be checked by arithmetic alone.
int MfccFeatureDim(const PipelineConfig &config);
int PlpFeatureDim(const PipelineConfig &config);
int IvectorDim(const PipelineConfig &config);
int PlpPcaDim(const PipelineConfig &config);
int SpeechSegmentDim(const PipelineConfig &config);
int FaceSegmentDim(const PipelineConfig &config);
int FusedDim(const PipelineConfig &config);

// Stable per-sample keys "<subject_id>/<ordinal>", with the ordinal
// counting that subject's entries of one modality in manifest order
// (before any split filtering, so keys survive re-filtering).
std::vector<std::pair<ManifestEntry, std::string>> KeyedEntries(
    const DatasetManifest &manifest, Modality modality,
    const std::string &split_filter);

// Batch commands. Paths are archives (text), blobs (binary), or
// manifests as noted. Commands throw the library error types; the CLI
// maps them to exit codes.
void CommandExtractMfcc(const PipelineConfig &config,
                        const std::string &manifest_path,
                        const std::string &output_path,
                        const std::string &split_filter);
void CommandExtractPlp(const PipelineConfig &config,
                       const std::string &manifest_path,
                       const std::string &output_path,
                       const std::string &split_filter);
void CommandTrainUbm(const PipelineConfig &config,
                     const std::string &features_path,
                     const std::string &output_path);
void CommandTrainTv(const PipelineConfig &config,
                    const std::string &features_path,
                    const std::string &ubm_path,
                    const std::string &output_path);
void CommandExtractIvector(const PipelineConfig &config,
                           const std::string &features_path,
                           const std::string &ubm_path,
                           const std::string &tv_path,
                           const std::string &output_path);
void CommandTrainDetector(const PipelineConfig &config,
                          const std::string &positives_manifest,
                          const std::string &negatives_manifest,
                          const std::string &output_path);
void CommandDetect(const PipelineConfig &config,
                   const std::string &manifest_path,
                   const std::string &detector_path,
                   const std::string &output_path,
                   const std::string &split_filter);
void CommandTrainSdm(const PipelineConfig &config,
                     const std::string &manifest_path,
                     const std::string &landmarks_path,
                     const std::string &output_path);
void CommandAlign(const PipelineConfig &config,
                  const std::string &manifest_path,
                  const std::string &sdm_path, const std::string &out_dir,
                  const std::string &split_filter);
void CommandTrainEmbedder(const PipelineConfig &config,
                          const std::string &manifest_path,
                          const std::string &output_path);
void CommandEmbed(const PipelineConfig &config,
                  const std::string &manifest_path,
                  const std::string &network_path,
                  const std::string &output_path,
                  const std::string &split_filter);
void CommandPcaFit(const PipelineConfig &config,
                   const std::string &input_path,
                   const std::string &model_path,
                   const std::string &transformed_path);
void CommandFuse(const PipelineConfig &config, const std::string &face_path,
                 const std::string &ivector_path,
                 const std::string &plp_pca_path,
                 const std::string &output_path,
                 const std::string &speech_out_path);
void CommandTrainDbn(const PipelineConfig &config,
                     const std::string &input_path,
                     const std::string &output_path);
void CommandScoreTrials(const PipelineConfig &config,
                        const std::string &vectors_path,
                        const std::string &trials_path,
                        const std::string &scores_path);
void CommandRoc(const PipelineConfig &config, const std::string &scores_path,
                const std::string &roc_path, const std::string &svg_path,
                std::ostream &summary);

// Process exit codes for the CLI: 0 success, 1 usage or parameter
// problems, 2 malformed or insufficient data, 3 violated numeric
// invariants.
int ExitCodeForCurrentException();

}  // namespace facevox

#endif  // FACEVOX_PIPELINE_HPP_
