// Copyright 2026 The RF Sentry Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "rfsentry/binary_io.hpp"
#include "rfsentry/cli.hpp"
#include "rfsentry/error.hpp"

namespace rfsentry::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "rfsentry");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("rfsentry_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  // A small corpus with short recordings keeps every command fast.
  std::string make_corpus(const std::string& name = "corpus", int per_class = 3, const std::string& seed = "5") {
    const auto r = invoke({"synth", "--n-per-class", std::to_string(per_class), "--seed-data", seed, "--length",
                           "4096", "--out", p(name)});
    EXPECT_EQ(r.code, 0) << r.err;
    return p(name + "/manifest.json");
  }

  std::string make_features(const std::string& manifest, const std::string& band, const std::string& name) {
    const auto r = invoke({"features", "--manifest", manifest, "--band", band, "--out", p(name)});
    EXPECT_EQ(r.code, 0) << r.err;
    return p(name);
  }

  fs::path dir_;
};

std::string slurp(const fs::path& path) { return read_file(path); }

json load_json(const std::string& path) { return json::parse(slurp(path)); }

TEST_F(CliTest, SynthWritesOneManifestAndTwoFilesPerSegment) {
  const auto r = invoke({"synth", "--n-per-class", "5", "--length", "4096", "--out", p("s")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto manifest = load_json(p("s/manifest.json"));
  EXPECT_EQ(manifest["entries"].size(), 50u);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "s/segments")) files += e.is_regular_file();
  EXPECT_EQ(files, 100u);
  std::size_t top = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "s")) top += e.is_regular_file();
  EXPECT_EQ(top, 1u);
  EXPECT_EQ(manifest["generator"]["n_per_class"], 5);
}

TEST_F(CliTest, SynthIsByteIdenticalForTheSameSeed) {
  make_corpus("a", 2, "9");
  make_corpus("b", 2, "9");
  EXPECT_EQ(slurp(dir_ / "a/manifest.json"), slurp(dir_ / "b/manifest.json"));
  for (const auto& e : fs::directory_iterator(dir_ / "a/segments")) {
    EXPECT_EQ(slurp(e.path()), slurp(dir_ / "b/segments" / e.path().filename())) << e.path();
  }
}

TEST_F(CliTest, SynthFailsBeforeWritingIntoAnUnusableDirectory) {
  std::ofstream(dir_ / "blocker") << "x";
  const auto r = invoke({"synth", "--n-per-class", "1", "--out", p("blocker/sub")});
  EXPECT_EQ(r.code, static_cast<int>(ExitCode::kIo));
  EXPECT_NE(r.err.find("blocker"), std::string::npos) << r.err;
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir_)) ++entries;
  EXPECT_EQ(entries, 1u);
}

TEST_F(CliTest, FeaturesReportDimensionsAndClassTable) {
  const auto manifest = make_corpus();
  auto r = invoke({"features", "--manifest", manifest, "--band", "lower", "--out", p("lb.rfds")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("d=1024"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("Bebop mode 1"), std::string::npos) << r.out;
  r = invoke({"features", "--manifest", manifest, "--band", "both", "--case", "2", "--out", p("both.rfds")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("d=2048"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("Phantom"), std::string::npos) << r.out;
}

TEST_F(CliTest, FeaturesWithMissingSegmentWritesNothing) {
  const auto manifest = make_corpus();
  fs::remove(dir_ / "corpus/segments/c4_0001_L.csv");
  const auto r = invoke({"features", "--manifest", manifest, "--out", p("lb.rfds")});
  EXPECT_EQ(r.code, static_cast<int>(ExitCode::kIo));
  EXPECT_NE(r.err.find("c4_0001"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir_ / "lb.rfds"));
  EXPECT_FALSE(fs::exists(dir_ / "lb.rfds.partial"));
}

TEST_F(CliTest, FeaturesAcceptADroneRfDirectory) {
  make_corpus("c", 2);
  const auto raw = dir_ / "dronerf";
  fs::create_directories(raw);
  // Class 0 under code 00000 and class 9 (Phantom) under 11000.
  for (const auto& [cls, code] : {std::pair{0, "00000"}, std::pair{9, "11000"}}) {
    for (int i = 0; i < 2; ++i) {
      const auto stem = fmt::format("c{}_{:04}", cls, i);
      fs::copy_file(dir_ / "c/segments" / (stem + "_L.csv"), raw / fmt::format("{}L_{}.csv", code, i));
      fs::copy_file(dir_ / "c/segments" / (stem + "_H.csv"), raw / fmt::format("{}H_{}.csv", code, i));
    }
  }
  const auto r = invoke({"features", "--manifest", raw.string(), "--case", "1", "--out", p("d.rfds")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ds = load_features(p("d.rfds"));
  EXPECT_EQ(ds.rows, 4u);
  EXPECT_EQ(ds.labels, (std::vector<int>{0, 0, 1, 1}));
  EXPECT_EQ(ds.segment_ids[2], "11000_0");
}

TEST_F(CliTest, BadFlagValuesAreConfigurationErrors) {
  const auto manifest = make_corpus("c", 1);
  EXPECT_EQ(invoke({"features", "--manifest", manifest, "--band", "middle", "--out", p("x")}).code, 2);
  EXPECT_EQ(invoke({"features", "--manifest", manifest, "--case", "7", "--out", p("x")}).code, 2);
  EXPECT_EQ(invoke({"features", "--manifest", manifest, "--frame-size", "1000", "--out", p("x")}).code, 2);
  EXPECT_EQ(invoke({"features", "--manifest", manifest, "--out", p("x"), "--bogus"}).code, 2);
  EXPECT_EQ(invoke({"features", "--out", p("x")}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST_F(CliTest, CvWritesReportAndCsvWithResolvedConfig) {
  const auto features = make_features(make_corpus(), "lower", "lb.rfds");
  const auto before = slurp(features);
  const auto r = invoke({"cv", "--features", features, "--case", "1", "--k-folds", "3", "--rounds", "5", "--out",
                         p("cv.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = load_json(p("cv.json"));
  EXPECT_EQ(doc["config"]["train"]["rounds"], 5);
  EXPECT_EQ(doc["config"]["train"]["eta"], 0.3);
  EXPECT_EQ(doc["config"]["k_folds"], 3);
  EXPECT_EQ(doc["config"]["case"], "I");
  EXPECT_EQ(doc["report"]["per_fold"]["accuracy"].size(), 3u);
  const auto csv = slurp(dir_ / "cv.csv");
  EXPECT_EQ(csv.rfind("case,band,fold,metric,value\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3 * 4);
  EXPECT_EQ(slurp(features), before) << "cv must not modify its input";
}

TEST_F(CliTest, CvIsDeterministicAndIndependentOfJobs) {
  const auto features = make_features(make_corpus(), "lower", "lb.rfds");
  ASSERT_EQ(invoke({"cv", "--features", features, "--k-folds", "3", "--rounds", "4", "--out", p("a.json")}).code, 0);
  ASSERT_EQ(invoke({"--jobs", "3", "cv", "--features", features, "--k-folds", "3", "--rounds", "4", "--out",
                    p("b.json")})
                .code,
            0);
  ASSERT_EQ(invoke({"cv", "--features", features, "--k-folds", "3", "--rounds", "4", "--jobs", "1", "--out",
                    p("c.json")})
                .code,
            0);
  EXPECT_EQ(slurp(dir_ / "a.json"), slurp(dir_ / "b.json"));
  EXPECT_EQ(slurp(dir_ / "a.json"), slurp(dir_ / "c.json"));
}

TEST_F(CliTest, CvWithOneFoldIsAConfigurationError) {
  const auto features = make_features(make_corpus(), "lower", "lb.rfds");
  const auto r = invoke({"cv", "--features", features, "--k-folds", "1", "--out", p("cv.json")});
  EXPECT_EQ(r.code, static_cast<int>(ExitCode::kConfig));
  EXPECT_FALSE(fs::exists(dir_ / "cv.json"));
}

TEST_F(CliTest, CompareReportsThreeBandsAndTwoTests) {
  const auto manifest = make_corpus();
  const auto r = invoke({"compare", "--manifest", manifest, "--case", "3", "--rounds", "3", "--out", p("cmp.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = load_json(p("cmp.json"));
  const auto& tests = doc["comparison"]["ttests"];
  ASSERT_EQ(tests.size(), 2u);
  for (const auto& t : tests) EXPECT_EQ(t["dof"], 9);
  EXPECT_TRUE(doc["config"].contains("config_fingerprint"));
  EXPECT_TRUE(doc["comparison"]["folds"].contains("fingerprint"));
  const auto fp = doc["comparison"]["folds"]["fingerprint"];
  for (const char* band : {"lower", "upper", "both"}) {
    EXPECT_EQ(doc["comparison"]["cv"][band]["fold_fingerprint"], fp) << band;
  }
  const auto csv = slurp(dir_ / "cmp.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3 * 10 * 4);
  EXPECT_NE(r.out.find("lower-vs-upper"), std::string::npos);
}

TEST_F(CliTest, TrainThenPredictMatchesInProcessModel) {
  const auto features = make_features(make_corpus(), "lower", "lb.rfds");
  auto r = invoke({"train", "--features", features, "--case", "2", "--rounds", "6", "--out", p("m.rfgb")});
  ASSERT_EQ(r.code, 0) << r.err;

  auto ds = relabel(load_features(features), LabelCase::kII);
  gbdt::TrainConfig cfg;
  cfg.n_rounds = 6;
  cfg.n_classes = 4;
  const auto model = gbdt::train(ds, cfg);
  EXPECT_EQ(slurp(dir_ / "m.rfgb"), gbdt::serialize_model(model));

  r = invoke({"predict", "--model", p("m.rfgb"), "--features", features, "--out", p("pred.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = load_json(p("pred.json"));
  const auto expected = gbdt::predict(model, ds.view());
  ASSERT_EQ(doc["predictions"].size(), ds.rows);
  for (std::size_t i = 0; i < ds.rows; ++i) {
    EXPECT_EQ(doc["predictions"][i]["label"], expected[i]);
    EXPECT_EQ(doc["predictions"][i]["id"], ds.segment_ids[i]);
  }
  EXPECT_NE(r.out.find("Phantom="), std::string::npos);
}

TEST_F(CliTest, PredictFromRawSegmentsMatchesFeaturePath) {
  const auto manifest = make_corpus();
  const auto features = make_features(manifest, "both", "both.rfds");
  ASSERT_EQ(invoke({"train", "--features", features, "--rounds", "4", "--out", p("m.rfgb")}).code, 0);
  const auto seg = dir_ / "corpus/segments";
  auto raw = invoke({"predict", "--model", p("m.rfgb"), "--lb", (seg / "c7_0002_L.csv").string(), "--ub",
                     (seg / "c7_0002_H.csv").string(), "--out", p("raw.json")});
  ASSERT_EQ(raw.code, 0) << raw.err;
  ASSERT_EQ(invoke({"predict", "--model", p("m.rfgb"), "--features", features, "--out", p("all.json")}).code, 0);
  const auto one = load_json(p("raw.json"))["predictions"][0];
  const auto all = load_json(p("all.json"))["predictions"];
  const auto row = 7 * 3 + 2;
  EXPECT_EQ(one["probabilities"], all[row]["probabilities"]);
}

TEST_F(CliTest, PredictWithWrongDimensionNamesTheExpectedSize) {
  const auto manifest = make_corpus();
  const auto lower = make_features(manifest, "lower", "lb.rfds");
  const auto both = make_features(manifest, "both", "both.rfds");
  ASSERT_EQ(invoke({"train", "--features", lower, "--rounds", "2", "--out", p("m.rfgb")}).code, 0);
  const auto r = invoke({"predict", "--model", p("m.rfgb"), "--features", both});
  EXPECT_EQ(r.code, static_cast<int>(ExitCode::kData));
  EXPECT_NE(r.err.find("d=1024"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("shape"), std::string::npos) << r.err;
}

TEST_F(CliTest, PredictNeedsExactlyOneInput) {
  const auto features = make_features(make_corpus("c", 1), "lower", "lb.rfds");
  ASSERT_EQ(invoke({"train", "--features", features, "--rounds", "1", "--out", p("m.rfgb")}).code, 0);
  EXPECT_EQ(invoke({"predict", "--model", p("m.rfgb")}).code, 2);
  EXPECT_EQ(invoke({"predict", "--model", p("m.rfgb"), "--lb", "x.csv"}).code, 2);
  EXPECT_EQ(invoke({"predict", "--model", p("m.rfgb"), "--features", features, "--lb", "x", "--ub", "y"}).code, 2);
}

TEST_F(CliTest, CorruptModelIsADataError) {
  std::ofstream(dir_ / "bad.rfgb") << "RFGX not a model";
  const auto features = make_features(make_corpus("c", 1), "lower", "lb.rfds");
  const auto r = invoke({"predict", "--model", p("bad.rfgb"), "--features", features});
  EXPECT_EQ(r.code, static_cast<int>(ExitCode::kData));
  EXPECT_EQ(invoke({"predict", "--model", p("missing.rfgb"), "--features", features}).code,
            static_cast<int>(ExitCode::kIo));
}

}  // namespace
}  // namespace rfsentry::cli
