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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>

#include "rfsentry/dataset.hpp"
#include "rfsentry/evaluation.hpp"
#include "rfsentry/gbdt.hpp"

namespace rfsentry::cli {

namespace fs = std::filesystem;

struct SynthOptions {
  std::size_t n_per_class = 5;
  std::uint64_t seed = 0;
  std::size_t length = kDefaultSynthLength;
  fs::path out_dir;
};

struct FeaturesOptions {
  fs::path manifest;
  BandMode band = BandMode::kLowerOnly;
  LabelCase label_case = LabelCase::kIII;
  FeatureConfig features;
  fs::path out;
};

struct TrainOptions {
  fs::path features;
  std::optional<LabelCase> label_case;
  gbdt::TrainConfig train;
  fs::path out;
};

struct CvOptions {
  fs::path features;
  std::optional<LabelCase> label_case;
  gbdt::TrainConfig train;
  int k = 10;
  std::uint64_t seed_data = 0;
  eval::Averaging averaging = eval::Averaging::kMacro;
  fs::path out;  // JSON report; the plot CSV goes next to it with a .csv extension
};

struct CompareOptions {
  fs::path manifest;
  LabelCase label_case = LabelCase::kI;
  eval::CompareOptions compare;
  fs::path out;
};

struct PredictOptions {
  fs::path model;
  std::optional<fs::path> features;
  std::optional<fs::path> lb;
  std::optional<fs::path> ub;
  std::optional<fs::path> out;
};

// Each command validates its options before touching the filesystem and
// writes its resolved configuration into the artifacts it produces.
void cmd_synth(const SynthOptions& options, std::ostream& out);
void cmd_features(const FeaturesOptions& options, std::ostream& out);
void cmd_train(const TrainOptions& options, std::ostream& out);
void cmd_cv(const CvOptions& options, std::ostream& out);
void cmd_compare(const CompareOptions& options, std::ostream& out);
void cmd_predict(const PredictOptions& options, std::ostream& out);

// Parses argv, dispatches, and maps failures onto exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

void configure_logging();

}  // namespace rfsentry::cli
