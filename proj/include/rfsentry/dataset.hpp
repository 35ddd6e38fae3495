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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfsentry/matrix.hpp"
#include "rfsentry/signal_spectrum.hpp"

namespace rfsentry {

// Classification tasks: drone presence, presence + type, presence + type + mode.
enum class LabelCase : std::uint8_t { kI = 1, kII = 2, kIII = 3 };

LabelCase parse_label_case(std::string_view text);  // "1" | "2" | "3"
std::string_view to_string(LabelCase c);             // "I" | "II" | "III"

struct LabelSchema {
  LabelCase label_case;
  int n_classes;
  std::vector<std::string> class_names;
};

// Canonical class ids. Case III: 0 = No Drone, 1-4 = Bebop modes 1-4,
// 5-8 = AR modes 1-4, 9 = Phantom mode 1. Cases I and II are projections.
const LabelSchema& schema_for(LabelCase c);

inline constexpr int kCase3Classes = 10;

struct CaseLabels {
  int case1 = 0;
  int case2 = 0;
  int case3 = 0;

  friend bool operator==(const CaseLabels&, const CaseLabels&) = default;
};

CaseLabels label_from_case3(int case3);
int project_label(int case3, LabelCase target);

struct SegmentRecord {
  std::string segment_id;
  Band band = Band::kLower;
  std::vector<double> samples;
  std::optional<CaseLabels> labels;
};

struct SegmentPair {
  SegmentRecord lower;
  SegmentRecord upper;
};

// Parses comma- and/or newline-separated decimal reals. `source` names the
// input in error messages.
std::vector<double> parse_samples(std::string_view text, std::string_view source);

SegmentRecord load_segment(const std::filesystem::path& path, Band band);

// Integer-valued samples are written without a fractional part, so files
// stay compact and reload bit-exactly.
void write_segment(const std::filesystem::path& path, std::span<const double> samples);

enum class DataSource : std::uint8_t { kDroneRF = 0, kSynthetic = 1 };

struct ManifestEntry {
  std::string id;
  std::filesystem::path lb_path;
  std::filesystem::path ub_path;
  int case3_label = 0;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  DataSource source = DataSource::kDroneRF;

  void validate() const;
};

// Relative entry paths are resolved against the manifest's directory.
Manifest load_manifest(const std::filesystem::path& path);
std::string manifest_to_json(const Manifest& manifest);
void save_manifest(const Manifest& manifest, const std::filesystem::path& path);

// Recognizes DroneRF file names "<BUI>L_<k>.csv" / "<BUI>H_<k>.csv" where the
// five-digit BUI encodes presence, drone type and mode.
Manifest manifest_from_dronerf_dir(const std::filesystem::path& dir);
std::optional<int> case3_from_dronerf_code(std::string_view bui);

std::vector<int> class_counts(std::span<const int> case3_labels, LabelCase c);

// Plain-text class-count table: class name, segment count, percentage.
std::string format_class_table(std::span<const int> case3_labels, LabelCase c);

struct LabeledDataset {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> features;  // row-major rows x cols
  std::vector<int> labels;
  BandMode band_mode = BandMode::kLowerOnly;
  LabelCase label_case = LabelCase::kIII;
  FeatureConfig feature_config;
  std::vector<std::string> segment_ids;
  std::vector<double> scaling_factors;  // one per row when concatenated, else empty

  MatrixView view() const { return {features, rows, cols}; }
  std::span<const double> row(std::size_t i) const { return view().row(i); }
  int n_classes() const { return schema_for(label_case).n_classes; }
  void validate() const;
};

// Extracts one row per manifest entry, in manifest order. Entries are
// processed in parallel into preallocated slots; the first failing entry (by
// position) aborts the build.
LabeledDataset build_dataset(const Manifest& manifest, BandMode mode, LabelCase label_case,
                             const FeatureConfig& config);

// Same, over segments already in memory.
LabeledDataset build_dataset(std::span<const SegmentPair> segments, BandMode mode, LabelCase label_case,
                             const FeatureConfig& config);

// Re-expresses a case-III dataset under a coarser schema.
LabeledDataset relabel(const LabeledDataset& dataset, LabelCase target);

LabeledDataset select_rows(const LabeledDataset& dataset, std::span<const std::size_t> rows);

inline constexpr std::uint16_t kFeatureFormatVersion = 1;

std::string serialize_features(const LabeledDataset& dataset);
LabeledDataset deserialize_features(std::string_view bytes);
void save_features(const LabeledDataset& dataset, const std::filesystem::path& path);
LabeledDataset load_features(const std::filesystem::path& path);

// ---- synthetic recordings ----------------------------------------------------

inline constexpr std::size_t kDefaultSynthLength = 8 * kDefaultFrameSize;

// Deterministic stand-in for one recorded segment of class `class_id`: ADC-count
// Gaussian noise plus class-specific tone combs in each band. Every sample is a
// pure function of (class_id, seed, band, index).
SegmentPair synth_segment(int class_id, std::uint64_t seed, std::size_t length);

// Seed of the i-th synthetic segment of a class under a base seed.
std::uint64_t synth_segment_seed(std::uint64_t base_seed, int class_id, std::size_t index);

// n_per_class segments of each case-III class, class-major order.
std::vector<SegmentPair> synth_corpus(std::size_t n_per_class, std::uint64_t base_seed, std::size_t length);

}  // namespace rfsentry
