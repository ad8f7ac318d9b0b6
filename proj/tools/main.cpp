// tools/main.cpp

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

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "facevox/error.hpp"
#include "facevox/pipeline.hpp"

namespace {

struct Args {
  std::string config_path;
  std::vector<std::string> overrides;

  std::string manifest;
  std::string features;
  std::string input;
  std::string output;
  std::string split;
  std::string ubm;
  std::string tv;
  std::string positives;
  std::string negatives;
  std::string detector;
  std::string landmarks;
  std::string sdm;
  std::string out_dir;
  std::string network;
  std::string model;
  std::string transformed;
  std::string face;
  std::string ivectors;
  std::string plp;
  std::string speech_out;
  std::string vectors;
  std::string trials;
  std::string scores;
  std::string roc_out;
  std::string svg_out;
};

facevox::PipelineConfig LoadConfig(const Args &args) {
  facevox::PipelineConfig config;
  if (!args.config_path.empty()) {
    config = facevox::PipelineConfig::FromFile(args.config_path);
  }
  for (const std::string &assignment : args.overrides) {
    config.ApplyOverride(assignment);
  }
  return config;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Bi-modal (face + speaker) biometric verification toolkit"};
  app.require_subcommand(1);

  Args args;
  app.add_option("-c,--config", args.config_path,
                 "key=value configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("-s,--set", args.overrides,
                 "override one configuration key, e.g. --set ubm.components=64");

  CLI::App *extract_mfcc = app.add_subcommand(
      "extract-mfcc", "Cepstra with deltas and log energy from audio");
  extract_mfcc->add_option("--manifest", args.manifest)->required();
  extract_mfcc->add_option("--output", args.output)->required();
  extract_mfcc->add_option("--split", args.split,
                           "train, train_test, test or all");

  CLI::App *extract_plp = app.add_subcommand(
      "extract-plp", "Perceptual linear prediction features from audio");
  extract_plp->add_option("--manifest", args.manifest)->required();
  extract_plp->add_option("--output", args.output)->required();
  extract_plp->add_option("--split", args.split);

  CLI::App *train_ubm = app.add_subcommand(
      "train-ubm", "Fit a diagonal-covariance background mixture model");
  train_ubm->add_option("--features", args.features)->required();
  train_ubm->add_option("--output", args.output)->required();

  CLI::App *train_tv = app.add_subcommand(
      "train-tv", "Learn the total variability subspace over a background model");
  train_tv->add_option("--features", args.features)->required();
  train_tv->add_option("--ubm", args.ubm)->required();
  train_tv->add_option("--output", args.output)->required();

  CLI::App *extract_ivector = app.add_subcommand(
      "extract-ivector", "Per-utterance subspace coordinates from features");
  extract_ivector->add_option("--features", args.features)->required();
  extract_ivector->add_option("--ubm", args.ubm)->required();
  extract_ivector->add_option("--tv", args.tv)->required();
  extract_ivector->add_option("--output", args.output)->required();

  CLI::App *train_detector = app.add_subcommand(
      "train-detector", "Boosted rectangle-feature face detector");
  train_detector->add_option("--positives", args.positives)->required();
  train_detector->add_option("--negatives", args.negatives)->required();
  train_detector->add_option("--output", args.output)->required();

  CLI::App *detect = app.add_subcommand(
      "detect", "Sliding-window detection over an image pyramid");
  detect->add_option("--manifest", args.manifest)->required();
  detect->add_option("--detector", args.detector)->required();
  detect->add_option("--output", args.output)->required();
  detect->add_option("--split", args.split);

  CLI::App *train_sdm = app.add_subcommand(
      "train-sdm", "Cascaded regression for landmark refinement");
  train_sdm->add_option("--manifest", args.manifest)->required();
  train_sdm->add_option("--landmarks", args.landmarks)->required();
  train_sdm->add_option("--output", args.output)->required();

  CLI::App *align = app.add_subcommand(
      "align", "Locate landmarks and warp faces to the canonical frame");
  align->add_option("--manifest", args.manifest)->required();
  align->add_option("--sdm", args.sdm)->required();
  align->add_option("--out-dir", args.out_dir)->required();
  align->add_option("--split", args.split);

  CLI::App *train_embedder = app.add_subcommand(
      "train-embedder", "Train the convolutional face embedding network");
  train_embedder->add_option("--manifest", args.manifest)->required();
  train_embedder->add_option("--output", args.output)->required();

  CLI::App *embed = app.add_subcommand(
      "embed", "Face embeddings from a trained network");
  embed->add_option("--manifest", args.manifest)->required();
  embed->add_option("--network", args.network)->required();
  embed->add_option("--output", args.output)->required();
  embed->add_option("--split", args.split);

  CLI::App *pca_fit = app.add_subcommand(
      "pca-fit", "Fit a principal subspace; optionally project the input");
  pca_fit->add_option("--input", args.input)->required();
  pca_fit->add_option("--model", args.model)->required();
  pca_fit->add_option("--transformed", args.transformed);

  CLI::App *fuse = app.add_subcommand(
      "fuse", "Concatenate face and speech segments per sample key");
  fuse->add_option("--face", args.face)->required();
  fuse->add_option("--ivectors", args.ivectors)->required();
  fuse->add_option("--plp", args.plp)->required();
  fuse->add_option("--output", args.output)->required();
  fuse->add_option("--speech-out", args.speech_out,
                   "also write the speech-only segments");

  CLI::App *train_dbn = app.add_subcommand(
      "train-dbn", "Stack-pretrain and fine-tune a deep belief network");
  train_dbn->add_option("--input", args.input)->required();
  train_dbn->add_option("--output", args.output)->required();

  CLI::App *score_trials = app.add_subcommand(
      "score-trials", "Cosine scores for labelled trial pairs");
  score_trials->add_option("--vectors", args.vectors)->required();
  score_trials->add_option("--trials", args.trials)->required();
  score_trials->add_option("--output", args.output)->required();

  CLI::App *roc = app.add_subcommand(
      "roc", "Operating curve and equal error rate from scored trials");
  roc->add_option("--scores", args.scores)->required();
  roc->add_option("--roc-out", args.roc_out);
  roc->add_option("--svg-out", args.svg_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const facevox::PipelineConfig config = LoadConfig(args);
    if (extract_mfcc->parsed()) {
      facevox::CommandExtractMfcc(config, args.manifest, args.output,
                                  args.split);
    } else if (extract_plp->parsed()) {
      facevox::CommandExtractPlp(config, args.manifest, args.output,
                                 args.split);
    } else if (train_ubm->parsed()) {
      facevox::CommandTrainUbm(config, args.features, args.output);
    } else if (train_tv->parsed()) {
      facevox::CommandTrainTv(config, args.features, args.ubm, args.output);
    } else if (extract_ivector->parsed()) {
      facevox::CommandExtractIvector(config, args.features, args.ubm, args.tv,
                                     args.output);
    } else if (train_detector->parsed()) {
      facevox::CommandTrainDetector(config, args.positives, args.negatives,
                                    args.output);
    } else if (detect->parsed()) {
      facevox::CommandDetect(config, args.manifest, args.detector, args.output,
                             args.split);
    } else if (train_sdm->parsed()) {
      facevox::CommandTrainSdm(config, args.manifest, args.landmarks,
                               args.output);
    } else if (align->parsed()) {
      facevox::CommandAlign(config, args.manifest, args.sdm, args.out_dir,
                            args.split);
    } else if (train_embedder->parsed()) {
      facevox::CommandTrainEmbedder(config, args.manifest, args.output);
    } else if (embed->parsed()) {
      facevox::CommandEmbed(config, args.manifest, args.network, args.output,
                            args.split);
    } else if (pca_fit->parsed()) {
      facevox::CommandPcaFit(config, args.input, args.model, args.transformed);
    } else if (fuse->parsed()) {
      facevox::CommandFuse(config, args.face, args.ivectors, args.plp,
                           args.output, args.speech_out);
    } else if (train_dbn->parsed()) {
      facevox::CommandTrainDbn(config, args.input, args.output);
    } else if (score_trials->parsed()) {
      facevox::CommandScoreTrials(config, args.vectors, args.trials,
                                  args.scores);
    } else if (roc->parsed()) {
      facevox::CommandRoc(config, args.scores, args.roc_out, args.svg_out,
                          std::cout);
    }
    return 0;
  } catch (const std::exception &e) {
    std::cerr << "facevox: error: " << e.what() << std::endl;
    return facevox::ExitCodeForCurrentException();
  }
}
