// tests/unit/test_fusion_pipeline.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "facevox/csv.hpp"
#include "facevox/error.hpp"
#include "facevox/fusion.hpp"
#include "facevox/manifest.hpp"
#include "facevox/model_io.hpp"
#include "facevox/pgm.hpp"
#include "facevox/pipeline.hpp"
#include "facevox/rng.hpp"
#include "synthetic.hpp"

using namespace facevox;

TEST_CASE("pca recovers a planted dominant axis") {
  Rng rng(3);
  const Eigen::Vector3d axis = Eigen::Vector3d(2.0, 1.0, -1.0).normalized();
  const Eigen::Vector3d minor = Eigen::Vector3d(1.0, -2.0, 0.0).normalized();
  Eigen::MatrixXd data(200, 3);
  for (int i = 0; i < 200; ++i) {
    data.row(i) = (Eigen::Vector3d::Ones() + 5.0 * rng.Normal() * axis +
                   0.2 * rng.Normal() * minor)
                      .transpose();
  }
  const PcaModel model = PcaFit(data, 2);
  REQUIRE(model.components.rows() == 2);
  REQUIRE(model.components.cols() == 3);
  CHECK(model.eigenvalues(0) >= model.eigenvalues(1));
  CHECK(model.eigenvalues(1) >= 0.0);
  // Rows are orthonormal.
  const Eigen::MatrixXd gram =
      model.components * model.components.transpose();
  CHECK((gram - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <
        1e-10);
  // Leading row matches the planted axis up to sign, and the stored sign
  // makes the first nonzero coordinate positive.
  CHECK(std::abs(model.components.row(0).dot(axis)) > 0.999);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (std::abs(model.components(r, c)) > 1e-12) {
        CHECK(model.components(r, c) > 0.0);
        break;
      }
    }
  }
  // Transform agrees with the direct projection.
  const Eigen::VectorXd x = data.row(7);
  const Eigen::VectorXd projected = PcaTransform(model, x);
  const Eigen::VectorXd direct =
      model.components * (x - model.mean);
  CHECK((projected - direct).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(PcaFit(data.topRows(1), 1), InsufficientDataError);
  CHECK_THROWS_AS(PcaFit(data, 0), ParameterError);
  CHECK_THROWS_AS(PcaFit(data, 4), ParameterError);
}

TEST_CASE("pca completes the basis when samples are scarce") {
  // Three samples span at most two directions; asking for three
  // components exercises the completion path.
  Eigen::MatrixXd data(3, 6);
  data.setZero();
  data(0, 0) = 2.0;
  data(1, 1) = 2.0;
  data(2, 0) = -1.0;
  data(2, 1) = -1.0;
  const PcaModel model = PcaFit(data, 3);
  REQUIRE(model.components.rows() == 3);
  const Eigen::MatrixXd gram =
      model.components * model.components.transpose();
  CHECK((gram - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <
        1e-10);
  // The appended direction carries no variance.
  CHECK(model.eigenvalues(2) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("serial fusion and cosine scoring") {
  Eigen::VectorXd a(2), b(3);
  a << 1.0, 2.0;
  b << 3.0, 4.0, 5.0;
  const Eigen::VectorXd ab = SerialFuse(a, b);
  REQUIRE(ab.size() == 5);
  CHECK(ab(0) == 1.0);
  CHECK(ab(4) == 5.0);

  Eigen::VectorXd u(2), v(2), w(2);
  u << 1.0, 0.0;
  v << 0.0, 2.0;
  w << -3.0, 0.0;
  CHECK(CosineScore(u, u) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(CosineScore(u, v) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(CosineScore(u, w) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK_THROWS_AS(CosineScore(u, b), ParameterError);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(CosineScore(u, zero), SingularityError);
}

TEST_CASE("min-max score normalization") {
  const std::vector<double> scores = {2.0, 4.0, 3.0, 6.0};
  const std::vector<double> normalized = MinMaxNormalize(scores);
  CHECK(normalized[0] == doctest::Approx(0.0));
  CHECK(normalized[1] == doctest::Approx(0.5));
  CHECK(normalized[2] == doctest::Approx(0.25));
  CHECK(normalized[3] == doctest::Approx(1.0));
  CHECK_THROWS_AS(MinMaxNormalize({1.0}), InsufficientDataError);
  CHECK_THROWS_AS(MinMaxNormalize({2.0, 2.0}), SingularityError);
}

TEST_CASE("frame resampling and flattening") {
  Eigen::MatrixXd frames(2, 3);
  frames << 0.0, 10.0, 20.0,
            2.0, 12.0, 22.0;
  const Eigen::MatrixXd up = ResampleFrames(frames, 3);
  REQUIRE(up.rows() == 3);
  CHECK(up.row(0) == frames.row(0));
  CHECK(up.row(2) == frames.row(1));
  CHECK(up(1, 0) == doctest::Approx(1.0));
  CHECK(up(1, 2) == doctest::Approx(21.0));

  const Eigen::MatrixXd single = ResampleFrames(frames.topRows(1), 4);
  REQUIRE(single.rows() == 4);
  CHECK(single.row(3) == frames.row(0));

  const Eigen::VectorXd flat = FlattenFrames(frames);
  REQUIRE(flat.size() == 6);
  CHECK(flat(0) == 0.0);
  CHECK(flat(2) == 20.0);
  CHECK(flat(3) == 2.0);

  CHECK_THROWS_AS(ResampleFrames(Eigen::MatrixXd(0, 3), 2),
                  InsufficientDataError);
  CHECK_THROWS_AS(ResampleFrames(frames, 0), ParameterError);
}

TEST_CASE("roc curve construction") {
  const std::vector<Trial> trials = {
      {0.9, true}, {0.8, true}, {0.8, false}, {0.4, true}, {0.2, false},
  };
  const std::vector<RocPoint> roc = ComputeRoc(trials);
  REQUIRE(roc.size() >= 2);
  // Sentinel accepts nothing.
  CHECK(roc.front().tpr == 0.0);
  CHECK(roc.front().fpr == 0.0);
  CHECK(roc.front().threshold > 0.9);
  // Curve is monotone and ends accepting everything.
  for (size_t i = 1; i < roc.size(); ++i) {
    CHECK(roc[i].tpr >= roc[i - 1].tpr);
    CHECK(roc[i].fpr >= roc[i - 1].fpr);
    CHECK(roc[i].threshold < roc[i - 1].threshold);
  }
  CHECK(roc.back().tpr == 1.0);
  CHECK(roc.back().fpr == 1.0);
  // Tied scores collapse into one operating point: at threshold 0.8 both
  // the second target and the first impostor flip together.
  bool found_tie_point = false;
  for (const RocPoint &p : roc) {
    if (p.threshold == 0.8) {
      CHECK(p.tpr == doctest::Approx(2.0 / 3.0));
      CHECK(p.fpr == doctest::Approx(0.5));
      found_tie_point = true;
    }
  }
  CHECK(found_tie_point);

  CHECK_THROWS_AS(ComputeRoc({{0.5, true}}), InsufficientDataError);
}

TEST_CASE("equal error rate on a two-level score table") {
  // 684 of 1000 targets sit at the high score; 316 of 1000 impostors sit
  // there too.  Accepting exactly the high scores misses 31.6% of
  // targets and admits 31.6% of impostors, so the crossing is exact.
  std::vector<Trial> trials;
  for (int i = 0; i < 684; ++i) trials.push_back({0.9, true});
  for (int i = 0; i < 316; ++i) trials.push_back({0.1, true});
  for (int i = 0; i < 316; ++i) trials.push_back({0.9, false});
  for (int i = 0; i < 684; ++i) trials.push_back({0.1, false});
  const EerResult eer = TrialsEer(trials);
  CHECK(eer.exact);
  CHECK(eer.eer == doctest::Approx(0.316).epsilon(1e-12));
  CHECK(eer.threshold == doctest::Approx(0.9));
}

TEST_CASE("equal error rate interpolates between operating points") {
  const std::vector<Trial> trials = {
      {0.9, true}, {0.7, true}, {0.6, false}, {0.5, true}, {0.3, false},
  };
  const EerResult eer = TrialsEer(trials);
  CHECK(!eer.exact);
  CHECK(eer.eer > 0.0);
  CHECK(eer.eer < 1.0);

  // Perfect separation pins the rate to zero.
  const std::vector<Trial> separated = {
      {0.9, true}, {0.8, true}, {0.2, false}, {0.1, false}};
  const EerResult zero = TrialsEer(separated);
  CHECK(zero.eer == doctest::Approx(0.0));
}

TEST_CASE("configuration defaults, overrides and hashing") {
  PipelineConfig config;
  CHECK(config.GetInt("ubm.components") == 16);
  CHECK(config.GetDouble("mfcc.pre_emphasis") == 0.97);
  CHECK(config.GetBool("fuse.normalize"));
  CHECK(config.Seed() == 0);
  CHECK_THROWS_AS(config.GetString("no.such.key"), ParameterError);

  config.ApplyOverride("ubm.components=32");
  CHECK(config.GetInt("ubm.components") == 32);
  CHECK_THROWS_AS(config.ApplyOverride("garbage"), ParameterError);
  CHECK_THROWS_AS(config.Set("unknown.key", "1"), ParameterError);

  const PipelineConfig parsed = PipelineConfig::FromText(
      "# comment line\n\nubm.components = 32\nseed=7\n");
  CHECK(parsed.GetInt("ubm.components") == 32);
  CHECK(parsed.Seed() == 7);
  CHECK_THROWS_AS(PipelineConfig::FromText("not an assignment\n"),
                  FormatError);

  // The hash covers the resolved configuration: explicit defaults do not
  // change it, real changes do.
  const PipelineConfig empty;
  PipelineConfig with_default;
  with_default.ApplyOverride("ubm.components=16");
  CHECK(empty.Hash() == with_default.Hash());
  PipelineConfig changed;
  changed.ApplyOverride("ubm.components=17");
  CHECK(changed.Hash() != empty.Hash());
}

TEST_CASE("segment widths follow from the configuration") {
  PipelineConfig config;
  CHECK(MfccFeatureDim(config) == 3 * 13 + 1);
  CHECK(PlpFeatureDim(config) == 13);
  CHECK(IvectorDim(config) == 8);
  CHECK(PlpPcaDim(config) == 16);
  CHECK(SpeechSegmentDim(config) == 24);
  CHECK(FaceSegmentDim(config) == 16);
  CHECK(FusedDim(config) == 40);

  // Publication-scale settings, checked by arithmetic alone.
  PipelineConfig paper;
  paper.ApplyOverride("mfcc.n_cepstra=13");
  paper.ApplyOverride("plp.order=12");
  paper.ApplyOverride("tv.rank=600");
  paper.ApplyOverride("pca.components=500");
  paper.ApplyOverride("face.embedding_dim=2048");
  CHECK(MfccFeatureDim(paper) == 40);
  CHECK(PlpFeatureDim(paper) == 13);
  CHECK(IvectorDim(paper) == 600);
  CHECK(PlpPcaDim(paper) == 500);
  CHECK(SpeechSegmentDim(paper) == 1100);
  CHECK(FaceSegmentDim(paper) == 2048);
  CHECK(FusedDim(paper) == 3148);
}

TEST_CASE("sample keys count per subject and modality before filtering") {
  const std::string text =
      "a,audio,a0.wav,train\n"
      "a,image,af0.pgm,train\n"
      "a,audio,a1.wav,test\n"
      "b,audio,b0.wav,test\n"
      "a,audio,a2.wav,train\n";
  const DatasetManifest manifest = ParseManifest(text);

  const auto all = KeyedEntries(manifest, Modality::kAudio, "");
  REQUIRE(all.size() == 4);
  CHECK(all[0].second == "a/0");
  CHECK(all[1].second == "a/1");
  CHECK(all[2].second == "b/0");
  CHECK(all[3].second == "a/2");

  // Filtering selects a subset but keeps the unfiltered ordinals.
  const auto test_only = KeyedEntries(manifest, Modality::kAudio, "test");
  REQUIRE(test_only.size() == 2);
  CHECK(test_only[0].second == "a/1");
  CHECK(test_only[1].second == "b/0");

  const auto images = KeyedEntries(manifest, Modality::kImage, "all");
  REQUIRE(images.size() == 1);
  CHECK(images[0].second == "a/0");

  CHECK_THROWS_AS(KeyedEntries(manifest, Modality::kAudio, "validation"),
                  ParameterError);
}

TEST_CASE("exception to exit code mapping") {
  const auto code_for = [](auto &&thrower) {
    try {
      thrower();
    } catch (...) {
      return ExitCodeForCurrentException();
    }
    return 0;
  };
  CHECK(code_for([] { throw ParameterError("x"); }) == 1);
  CHECK(code_for([] { throw FormatError("x"); }) == 2);
  CHECK(code_for([] { throw VersionError("x"); }) == 2);
  CHECK(code_for([] { throw InsufficientDataError("x"); }) == 2);
  CHECK(code_for([] { throw SingularityError("x"); }) == 3);
  CHECK(code_for([] { throw std::runtime_error("x"); }) == 3);
}

TEST_CASE("speech and face batch commands cooperate end to end") {
  using facevox::testing::BimodalCorpusOptions;
  using facevox::testing::BuildBimodalCorpus;
  using facevox::testing::MakeTrials;

  const std::string dir = facevox::testing::MakeTempDir("pipeline");
  BimodalCorpusOptions corpus_options;
  corpus_options.n_subjects = 3;
  corpus_options.train_per_subject = 2;
  corpus_options.test_per_subject = 1;
  corpus_options.sample_rate = 8000;
  corpus_options.seconds = 0.5;
  corpus_options.face_size = 16;
  corpus_options.seed = 5;
  const auto corpus = BuildBimodalCorpus(dir + "/corpus", corpus_options);

  PipelineConfig config;
  config.ApplyOverride("seed=11");
  config.ApplyOverride("ubm.components=4");
  config.ApplyOverride("ubm.iterations=3");
  config.ApplyOverride("tv.rank=3");
  config.ApplyOverride("tv.iterations=2");
  config.ApplyOverride("face.size=16");
  config.ApplyOverride("face.conv_channels=2");
  config.ApplyOverride("face.trunk_units=12");
  config.ApplyOverride("face.embedding_dim=4");
  config.ApplyOverride("train.epochs=2");
  config.ApplyOverride("train.batch=4");
  config.ApplyOverride("pca.components=2");
  config.ApplyOverride("pca.resample_frames=5");

  const std::string mfcc_path = dir + "/mfcc.txt";
  CommandExtractMfcc(config, corpus.manifest_path, mfcc_path, "train");
  const MatrixArchive mfcc = ReadMatrixArchiveFile(mfcc_path);
  CHECK(mfcc.kind == "mfcc");
  CHECK(mfcc.header.command == "extract-mfcc");
  CHECK(mfcc.header.config_hash == config.Hash());
  REQUIRE(mfcc.entries.size() == 6);
  CHECK(mfcc.entries[0].values.cols() == MfccFeatureDim(config));
  CHECK(mfcc.entries[0].values.rows() > 5);

  const std::string plp_all = dir + "/plp_all.txt";
  CommandExtractPlp(config, corpus.manifest_path, plp_all, "");
  const MatrixArchive plp = ReadMatrixArchiveFile(plp_all);
  CHECK(plp.kind == "plp");
  REQUIRE(plp.entries.size() == 9);
  CHECK(plp.entries[0].values.cols() == PlpFeatureDim(config));

  const std::string ubm_path = dir + "/ubm.bin";
  CommandTrainUbm(config, mfcc_path, ubm_path);
  CHECK(PeekBlobKind(ReadBlobFile(ubm_path)) == BlobKind::kGmm);

  const std::string tv_path = dir + "/tv.bin";
  CommandTrainTv(config, mfcc_path, ubm_path, tv_path);
  CHECK(PeekBlobKind(ReadBlobFile(tv_path)) == BlobKind::kTotalVariability);

  const std::string mfcc_test = dir + "/mfcc_test.txt";
  CommandExtractMfcc(config, corpus.manifest_path, mfcc_test, "test");
  const std::string iv_path = dir + "/iv.txt";
  CommandExtractIvector(config, mfcc_test, ubm_path, tv_path, iv_path);
  const MatrixArchive ivs = ReadMatrixArchiveFile(iv_path);
  CHECK(ivs.kind == "ivector");
  REQUIRE(ivs.entries.size() == 3);
  CHECK(ivs.entries[0].values.rows() == 1);
  CHECK(ivs.entries[0].values.cols() == 3);

  const std::string embedder_path = dir + "/embedder.bin";
  CommandTrainEmbedder(config, corpus.manifest_path, embedder_path);
  const std::string emb_path = dir + "/emb_test.txt";
  CommandEmbed(config, corpus.manifest_path, embedder_path, emb_path, "test");
  const MatrixArchive embs = ReadMatrixArchiveFile(emb_path);
  CHECK(embs.kind == "embedding");
  REQUIRE(embs.entries.size() == 3);
  CHECK(embs.entries[0].values.cols() == 4);

  const std::string pca_model = dir + "/plp_pca.bin";
  const std::string plp_proj = dir + "/plp_proj.txt";
  CommandPcaFit(config, plp_all, pca_model, plp_proj);
  CHECK(PeekBlobKind(ReadBlobFile(pca_model)) == BlobKind::kPca);
  const MatrixArchive proj = ReadMatrixArchiveFile(plp_proj);
  CHECK(proj.kind == "pca");
  REQUIRE(proj.entries.size() == 9);
  CHECK(proj.entries[0].values.cols() == 2);

  const std::string fused_path = dir + "/fused.txt";
  const std::string speech_path = dir + "/speech.txt";
  CommandFuse(config, emb_path, iv_path, plp_proj, fused_path, speech_path);
  const MatrixArchive fused = ReadMatrixArchiveFile(fused_path);
  CHECK(fused.kind == "fused");
  REQUIRE(fused.entries.size() == 3);
  CHECK(fused.entries[0].values.cols() ==
        FaceSegmentDim(config) + SpeechSegmentDim(config));
  CHECK(fused.entries[0].values.cols() == 4 + 3 + 2);
  const MatrixArchive speech = ReadMatrixArchiveFile(speech_path);
  CHECK(speech.kind == "speech");
  REQUIRE(speech.entries.size() == 3);
  // Normalized speech segments have unit length.
  CHECK(speech.entries[0].values.norm() == doctest::Approx(1.0).epsilon(1e-9));

  // Scoring wants multiple samples per subject, so score the projected
  // spectral features across all nine samples instead.
  std::vector<std::string> keys;
  for (const NamedMatrix &entry : proj.entries) keys.push_back(entry.key);
  const std::vector<TrialPair> trials = MakeTrials(keys, 1, 77);
  std::ostringstream trial_text;
  for (const TrialPair &t : trials) {
    trial_text << t.id_a << "," << t.id_b << "," << t.label << "\n";
  }
  const std::string trials_path = dir + "/trials.csv";
  WriteTextFile(trials_path, trial_text.str());
  const std::string scores_path = dir + "/scores.csv";
  CommandScoreTrials(config, plp_proj, trials_path, scores_path);
  const auto scored = ReadScoreCsvFile(scores_path);
  CHECK(scored.size() == trials.size());

  const std::string roc_path = dir + "/roc.csv";
  const std::string svg_path = dir + "/roc.svg";
  std::ostringstream summary;
  CommandRoc(config, scores_path, roc_path, svg_path, summary);
  const std::string line = summary.str();
  CHECK(line.find("eer=") == 0);
  CHECK(line.find("trials=") != std::string::npos);
  const std::string svg = ReadTextFile(svg_path);
  CHECK(svg.find("<!-- command=roc") == 0);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);

  // Determinism: the same command with the same inputs writes the same
  // bytes.
  const std::string mfcc2 = dir + "/mfcc_again.txt";
  CommandExtractMfcc(config, corpus.manifest_path, mfcc2, "train");
  CHECK(ReadTextFile(mfcc2) == ReadTextFile(mfcc_path));
}

TEST_CASE("detector and alignment batch commands") {
  using facevox::testing::MakeDetectorNegatives;
  using facevox::testing::MakeDetectorPositives;
  using facevox::testing::MakeLandmarkCorpus;
  using facevox::testing::MakeSceneWithTarget;

  const std::string dir = facevox::testing::MakeTempDir("facecmd");
  PipelineConfig config;
  config.ApplyOverride("detector.window=16");
  config.ApplyOverride("detector.rounds=4");
  config.ApplyOverride("sdm.stages=2");
  config.ApplyOverride("sdm.patch_radius=3");
  config.ApplyOverride("face.size=16");

  // Manifests of positive and negative training windows.
  DatasetManifest pos_manifest, neg_manifest, scene_manifest;
  const auto positives = MakeDetectorPositives(25, 16, 1);
  const auto negatives = MakeDetectorNegatives(40, 16, 2);
  for (size_t i = 0; i < positives.size(); ++i) {
    const std::string path = dir + "/pos" + std::to_string(i) + ".pgm";
    WritePgmFile(path, positives[i]);
    pos_manifest.entries.push_back(
        {"pos", Modality::kImage, path, Split::kTrain});
  }
  for (size_t i = 0; i < negatives.size(); ++i) {
    const std::string path = dir + "/neg" + std::to_string(i) + ".pgm";
    WritePgmFile(path, negatives[i]);
    neg_manifest.entries.push_back(
        {"neg", Modality::kImage, path, Split::kTrain});
  }
  const std::string pos_path = dir + "/pos.csv";
  const std::string neg_path = dir + "/neg.csv";
  WriteTextFile(pos_path, FormatManifest(pos_manifest));
  WriteTextFile(neg_path, FormatManifest(neg_manifest));

  const std::string detector_path = dir + "/detector.bin";
  CommandTrainDetector(config, pos_path, neg_path, detector_path);
  CHECK(PeekBlobKind(ReadBlobFile(detector_path)) == BlobKind::kDetector);

  const GrayImage scene = MakeSceneWithTarget(40, 36, 12, 10, 16, 3);
  const std::string scene_path = dir + "/scene.pgm";
  WritePgmFile(scene_path, scene);
  scene_manifest.entries.push_back(
      {"scene", Modality::kImage, scene_path, Split::kTest});
  const std::string scene_manifest_path = dir + "/scene.csv";
  WriteTextFile(scene_manifest_path, FormatManifest(scene_manifest));

  const std::string detections_path = dir + "/detections.txt";
  CommandDetect(config, scene_manifest_path, detector_path, detections_path,
                "test");
  const MatrixArchive detections = ReadMatrixArchiveFile(detections_path);
  CHECK(detections.kind == "detections");
  REQUIRE(detections.entries.size() == 1);
  CHECK(detections.entries[0].values.cols() == 5);

  // Alignment: train a landmark regressor and align a held-out image.
  const auto landmarks = MakeLandmarkCorpus(16, 48, 2.0, 4);
  DatasetManifest lm_manifest;
  MatrixArchive lm_archive;
  lm_archive.kind = "landmarks";
  for (size_t i = 0; i < landmarks.images.size(); ++i) {
    const std::string path = dir + "/lm" + std::to_string(i) + ".pgm";
    WritePgmFile(path, landmarks.images[i]);
    lm_manifest.entries.push_back(
        {"face", Modality::kImage, path, Split::kTrain});
    lm_archive.entries.push_back(NamedMatrix{
        "face/" + std::to_string(i), landmarks.shapes[i].transpose()});
  }
  const std::string lm_manifest_path = dir + "/lm.csv";
  WriteTextFile(lm_manifest_path, FormatManifest(lm_manifest));
  const std::string lm_archive_path = dir + "/lm.txt";
  WriteMatrixArchiveFile(lm_archive_path, lm_archive);

  const std::string sdm_path = dir + "/sdm.bin";
  CommandTrainSdm(config, lm_manifest_path, lm_archive_path, sdm_path);
  CHECK(PeekBlobKind(ReadBlobFile(sdm_path)) == BlobKind::kSdm);

  const std::string aligned_dir = dir + "/aligned";
  CommandAlign(config, lm_manifest_path, sdm_path, aligned_dir, "");
  const std::string aligned_manifest_text =
      ReadTextFile(aligned_dir + "/manifest.csv");
  CHECK(aligned_manifest_text.find("# command=align") == 0);
  // The written manifest parses once the provenance line is dropped.
  const std::string body =
      aligned_manifest_text.substr(aligned_manifest_text.find('\n') + 1);
  const DatasetManifest aligned = ParseManifest(body);
  REQUIRE(aligned.entries.size() == 16);
  const GrayImage one = ReadPgmFile(aligned.entries[0].path);
  CHECK(one.width == 16);
  CHECK(one.height == 16);
  // The image itself names its producer right after the format magic.
  const std::string raw_pgm = ReadTextFile(aligned.entries[0].path);
  CHECK(raw_pgm.find("P5\n# command=align") == 0);
}

TEST_CASE("deep belief network training command") {
  const std::string dir = facevox::testing::MakeTempDir("dbncmd");
  Rng rng(9);
  MatrixArchive archive;
  archive.kind = "embedding";
  for (int i = 0; i < 24; ++i) {
    const int label = i % 2;
    Eigen::MatrixXd row(1, 6);
    for (int j = 0; j < 6; ++j) {
      const double center =
          label == 0 ? (j < 3 ? 1.0 : 0.0) : (j < 3 ? 0.0 : 1.0);
      row(0, j) = center + 0.1 * rng.Normal();
    }
    archive.entries.push_back(NamedMatrix{
        (label == 0 ? "a/" : "b/") + std::to_string(i / 2), row});
  }
  const std::string input_path = dir + "/vectors.txt";
  WriteMatrixArchiveFile(input_path, archive);

  PipelineConfig config;
  config.ApplyOverride("dbn.widths=5,4");
  config.ApplyOverride("dbn.pretrain_epochs=2");
  config.ApplyOverride("dbn.epochs=3");
  config.ApplyOverride("dbn.batch=6");
  const std::string net_path = dir + "/dbn.bin";
  CommandTrainDbn(config, input_path, net_path);
  const LayeredNetwork net = DeserializeNetwork(ReadBlobFile(net_path));
  // Two pretrained layers plus the attached decision head.
  REQUIRE(net.layers.size() == 3);
  const TensorShape out = OutputShape(net);
  CHECK(out.Size() == 2);
}
