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

#include "rfsentry/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <regex>
#include <tuple>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "rfsentry/binary_io.hpp"
#include "rfsentry/error.hpp"
#include "rfsentry/parallel.hpp"

namespace rfsentry {

namespace fs = std::filesystem;

LabelCase parse_label_case(std::string_view text) {
  if (text == "1" || text == "I") return LabelCase::kI;
  if (text == "2" || text == "II") return LabelCase::kII;
  if (text == "3" || text == "III") return LabelCase::kIII;
  throw Error(ErrorKind::kConfig, fmt::format("unknown case '{}' (expected 1, 2 or 3)", text));
}

std::string_view to_string(LabelCase c) {
  switch (c) {
    case LabelCase::kI: return "I";
    case LabelCase::kII: return "II";
    case LabelCase::kIII: return "III";
  }
  return "?";
}

const LabelSchema& schema_for(LabelCase c) {
  static const LabelSchema kCase1{LabelCase::kI, 2, {"No Drone", "Drone"}};
  static const LabelSchema kCase2{LabelCase::kII, 4, {"No Drone", "Bebop", "AR", "Phantom"}};
  static const LabelSchema kCase3{LabelCase::kIII,
                                  10,
                                  {"No Drone", "Bebop mode 1", "Bebop mode 2", "Bebop mode 3", "Bebop mode 4",
                                   "AR mode 1", "AR mode 2", "AR mode 3", "AR mode 4", "Phantom mode 1"}};
  switch (c) {
    case LabelCase::kI: return kCase1;
    case LabelCase::kII: return kCase2;
    case LabelCase::kIII: return kCase3;
  }
  throw Error(ErrorKind::kSchema, "unknown label case");
}

CaseLabels label_from_case3(int case3) {
  if (case3 < 0 || case3 >= kCase3Classes) {
    throw Error(ErrorKind::kSchema, fmt::format("case-III label {} outside 0..9", case3));
  }
  CaseLabels out;
  out.case3 = case3;
  out.case1 = case3 == 0 ? 0 : 1;
  if (case3 == 0) {
    out.case2 = 0;
  } else if (case3 <= 4) {
    out.case2 = 1;
  } else if (case3 <= 8) {
    out.case2 = 2;
  } else {
    out.case2 = 3;
  }
  return out;
}

int project_label(int case3, LabelCase target) {
  const auto labels = label_from_case3(case3);
  switch (target) {
    case LabelCase::kI: return labels.case1;
    case LabelCase::kII: return labels.case2;
    case LabelCase::kIII: return labels.case3;
  }
  throw Error(ErrorKind::kSchema, "unknown label case");
}

// ---- segment text files --------------------------------------------------------

std::vector<double> parse_samples(std::string_view text, std::string_view source) {
  std::vector<double> out;
  out.reserve(text.size() / 8);
  std::size_t line = 1;
  std::size_t line_start = 0;
  std::size_t token_index = 0;
  std::size_t i = 0;
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };

  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      line_start = ++i;
      continue;
    }
    if (c == ',' || is_space(c)) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && text[end] != ',' && text[end] != '\n' && !is_space(text[end])) ++end;
    ++token_index;
    const auto token = text.substr(i, end - i);
    double value = 0.0;
    const char* first = token.data();
    if (!token.empty() && token.front() == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      throw Error(ErrorKind::kParse, fmt::format("{}: line {}, column {}: token {} '{}' is not a number", source,
                                                 line, i - line_start + 1, token_index, token));
    }
    if (!std::isfinite(value)) {
      throw Error(ErrorKind::kParse, fmt::format("{}: line {}, column {}: token {} '{}' is not finite", source,
                                                 line, i - line_start + 1, token_index, token));
    }
    out.push_back(value);
    i = end;
  }
  return out;
}

SegmentRecord load_segment(const fs::path& path, Band band) {
  const std::string text = read_file(path);
  SegmentRecord rec;
  rec.segment_id = path.stem().string();
  rec.band = band;
  rec.samples = parse_samples(text, path.string());
  if (rec.samples.empty()) {
    throw Error(ErrorKind::kInsufficientData, fmt::format("{}: no samples", path.string()));
  }
  return rec;
}

void write_segment(const fs::path& path, std::span<const double> samples) {
  std::string out;
  out.reserve(samples.size() * 6);
  char buf[32];
  for (double v : samples) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw Error(ErrorKind::kInvalidArgument, "sample not representable as text");
    out.append(buf, ptr);
    out.push_back('\n');
  }
  write_file_atomic(path, out);
}

// ---- manifest ----------------------------------------------------------------------

void Manifest::validate() const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const auto name = e.id.empty() ? fmt::format("#{}", i) : e.id;
    if (e.lb_path.empty() || e.ub_path.empty()) {
      throw Error(ErrorKind::kSchema, fmt::format("manifest entry {} lacks a band path", name));
    }
    if (e.case3_label < 0 || e.case3_label >= kCase3Classes) {
      throw Error(ErrorKind::kSchema, fmt::format("manifest entry {} label {} outside 0..9", name, e.case3_label));
    }
  }
}

namespace {

std::string_view to_string(DataSource s) { return s == DataSource::kDroneRF ? "DroneRF" : "Synthetic"; }

DataSource parse_source(std::string_view s) {
  if (s == "DroneRF") return DataSource::kDroneRF;
  if (s == "Synthetic") return DataSource::kSynthetic;
  throw Error(ErrorKind::kSchema, fmt::format("unknown manifest source '{}'", s));
}

}  // namespace

Manifest load_manifest(const fs::path& path) {
  const std::string text = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, fmt::format("{}: {}", path.string(), e.what()));
  }
  Manifest m;
  const auto base = path.parent_path();
  try {
    m.source = parse_source(doc.at("source").get<std::string>());
    const auto& entries = doc.at("entries");
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      ManifestEntry entry;
      entry.id = e.value("id", fmt::format("entry{}", i));
      if (!e.contains("lb_path") || !e.contains("ub_path")) {
        throw Error(ErrorKind::kSchema, fmt::format("manifest entry {} lacks a band path", entry.id));
      }
      entry.lb_path = e.at("lb_path").get<std::string>();
      entry.ub_path = e.at("ub_path").get<std::string>();
      if (entry.lb_path.is_relative()) entry.lb_path = base / entry.lb_path;
      if (entry.ub_path.is_relative()) entry.ub_path = base / entry.ub_path;
      entry.case3_label = e.at("label").get<int>();
      m.entries.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kSchema, fmt::format("{}: {}", path.string(), e.what()));
  }
  m.validate();
  return m;
}

std::string manifest_to_json(const Manifest& manifest) {
  nlohmann::ordered_json doc;
  doc["source"] = to_string(manifest.source);
  auto entries = nlohmann::ordered_json::array();
  for (const auto& e : manifest.entries) {
    nlohmann::ordered_json j;
    j["id"] = e.id;
    j["lb_path"] = e.lb_path.generic_string();
    j["ub_path"] = e.ub_path.generic_string();
    j["label"] = e.case3_label;
    entries.push_back(std::move(j));
  }
  doc["entries"] = std::move(entries);
  return doc.dump(2) + "\n";
}

void save_manifest(const Manifest& manifest, const fs::path& path) {
  manifest.validate();
  write_file_atomic(path, manifest_to_json(manifest));
}

std::optional<int> case3_from_dronerf_code(std::string_view bui) {
  static const std::map<std::string_view, int> kCodes = {
      {"00000", 0}, {"10000", 1}, {"10001", 2}, {"10010", 3}, {"10011", 4},
      {"10100", 5}, {"10101", 6}, {"10110", 7}, {"10111", 8}, {"11000", 9},
  };
  const auto it = kCodes.find(bui);
  if (it == kCodes.end()) return std::nullopt;
  return it->second;
}

Manifest manifest_from_dronerf_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::kIo, fmt::format("'{}' is not a directory", dir.string()));
  static const std::regex kName(R"(^(\d{5})([LH])_(\d+)\.csv$)");
  // (bui, index) -> (lower, upper)
  std::map<std::tuple<int, std::string, int>, std::pair<fs::path, fs::path>> pairs;
  for (const auto& item : fs::recursive_directory_iterator(dir)) {
    if (!item.is_regular_file()) continue;
    const auto name = item.path().filename().string();
    std::smatch match;
    if (!std::regex_match(name, match, kName)) continue;
    const auto label = case3_from_dronerf_code(match[1].str());
    if (!label) continue;
    auto& slot = pairs[{*label, match[1].str(), std::stoi(match[3].str())}];
    (match[2].str() == "L" ? slot.first : slot.second) = item.path();
  }
  Manifest m;
  m.source = DataSource::kDroneRF;
  for (const auto& [key, paths] : pairs) {
    const auto& [label, bui, index] = key;
    if (paths.first.empty() || paths.second.empty()) {
      throw Error(ErrorKind::kSchema, fmt::format("DroneRF segment {}_{} is missing a band file", bui, index));
    }
    m.entries.push_back({fmt::format("{}_{}", bui, index), paths.first, paths.second, label});
  }
  return m;
}

std::vector<int> class_counts(std::span<const int> case3_labels, LabelCase c) {
  std::vector<int> counts(static_cast<std::size_t>(schema_for(c).n_classes), 0);
  for (int l : case3_labels) ++counts[static_cast<std::size_t>(project_label(l, c))];
  return counts;
}

std::string format_class_table(std::span<const int> case3_labels, LabelCase c) {
  const auto& schema = schema_for(c);
  const auto counts = class_counts(case3_labels, c);
  const double total = static_cast<double>(case3_labels.size());
  std::string out = fmt::format("Case {} ({} classes, {} segments)\n", to_string(c), schema.n_classes,
                                case3_labels.size());
  out += fmt::format("  {:<16} {:>8} {:>9}\n", "Class", "Segments", "Percent");
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double pct = total > 0 ? 100.0 * counts[k] / total : 0.0;
    out += fmt::format("  {:<16} {:>8} {:>8.2f}%\n", schema.class_names[k], counts[k], pct);
  }
  return out;
}

// ---- labeled dataset -----------------------------------------------------------

void LabeledDataset::validate() const {
  if (features.size() != rows * cols) {
    throw Error(ErrorKind::kShape, fmt::format("feature buffer {} != {} x {}", features.size(), rows, cols));
  }
  if (labels.size() != rows) {
    throw Error(ErrorKind::kShape, fmt::format("{} labels for {} rows", labels.size(), rows));
  }
  if (!segment_ids.empty() && segment_ids.size() != rows) {
    throw Error(ErrorKind::kShape, "segment id count does not match rows");
  }
  if (band_mode == BandMode::kConcatenated ? scaling_factors.size() != rows : !scaling_factors.empty()) {
    throw Error(ErrorKind::kShape, "scaling factors present iff band mode is concatenated");
  }
  const int n = n_classes();
  for (std::size_t i = 0; i < rows; ++i) {
    if (labels[i] < 0 || labels[i] >= n) {
      throw Error(ErrorKind::kSchema, fmt::format("row {} label {} outside 0..{}", i, labels[i], n - 1));
    }
  }
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (!std::isfinite(features[i])) {
      throw Error(ErrorKind::kShape, fmt::format("non-finite feature at row {}", i / cols));
    }
  }
}

namespace {

struct RowSource {
  std::string id;
  int case3_label;
};

template <typename Fetch>
LabeledDataset assemble(std::span<const RowSource> sources, BandMode mode, LabelCase label_case,
                        const FeatureConfig& config, Fetch&& fetch_row) {
  config.validate();
  if (sources.empty()) throw Error(ErrorKind::kInsufficientData, "cannot build a dataset from zero segments");

  LabeledDataset ds;
  ds.rows = sources.size();
  ds.cols = config.feature_dim(mode);
  ds.band_mode = mode;
  ds.label_case = label_case;
  ds.feature_config = config;
  ds.features.assign(ds.rows * ds.cols, 0.0);
  ds.labels.resize(ds.rows);
  ds.segment_ids.resize(ds.rows);
  if (mode == BandMode::kConcatenated) ds.scaling_factors.assign(ds.rows, 1.0);

  FirstError errors;
  const auto n = static_cast<std::ptrdiff_t>(ds.rows);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto row = static_cast<std::size_t>(i);
    errors.run(row, [&] {
      try {
        const FeatureVector fv = fetch_row(row);
        if (fv.values.size() != ds.cols) {
          throw Error(ErrorKind::kShape, fmt::format("{} features, expected {}", fv.values.size(), ds.cols));
        }
        std::copy(fv.values.begin(), fv.values.end(), ds.features.begin() + static_cast<std::ptrdiff_t>(row * ds.cols));
        if (fv.scaling_factor) ds.scaling_factors[row] = *fv.scaling_factor;
        ds.labels[row] = project_label(sources[row].case3_label, label_case);
        ds.segment_ids[row] = sources[row].id;
      } catch (const Error& e) {
        throw Error(e.kind(), fmt::format("segment '{}': {}", sources[row].id, e.what()));
      }
    });
  }
  errors.rethrow();
  return ds;
}

}  // namespace

LabeledDataset build_dataset(const Manifest& manifest, BandMode mode, LabelCase label_case,
                             const FeatureConfig& config) {
  manifest.validate();
  std::vector<RowSource> sources;
  sources.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) sources.push_back({e.id, e.case3_label});
  return assemble(sources, mode, label_case, config, [&](std::size_t i) {
    const auto& e = manifest.entries[i];
    std::vector<double> lower;
    std::vector<double> upper;
    if (mode != BandMode::kUpperOnly) lower = load_segment(e.lb_path, Band::kLower).samples;
    if (mode != BandMode::kLowerOnly) upper = load_segment(e.ub_path, Band::kUpper).samples;
    return extract_features(lower, upper, mode, config);
  });
}

LabeledDataset build_dataset(std::span<const SegmentPair> segments, BandMode mode, LabelCase label_case,
                             const FeatureConfig& config) {
  std::vector<RowSource> sources;
  sources.reserve(segments.size());
  for (const auto& s : segments) {
    if (!s.lower.labels) {
      throw Error(ErrorKind::kSchema, fmt::format("segment '{}' carries no labels", s.lower.segment_id));
    }
    sources.push_back({s.lower.segment_id, s.lower.labels->case3});
  }
  return assemble(sources, mode, label_case, config, [&](std::size_t i) {
    return extract_features(segments[i].lower.samples, segments[i].upper.samples, mode, config);
  });
}

LabeledDataset relabel(const LabeledDataset& dataset, LabelCase target) {
  if (dataset.label_case == target) return dataset;
  if (dataset.label_case != LabelCase::kIII) {
    throw Error(ErrorKind::kConfig, fmt::format("cannot relabel a case-{} dataset as case {}",
                                                to_string(dataset.label_case), to_string(target)));
  }
  LabeledDataset out = dataset;
  out.label_case = target;
  for (int& l : out.labels) l = project_label(l, target);
  return out;
}

LabeledDataset select_rows(const LabeledDataset& dataset, std::span<const std::size_t> rows) {
  LabeledDataset out;
  out.rows = rows.size();
  out.cols = dataset.cols;
  out.band_mode = dataset.band_mode;
  out.label_case = dataset.label_case;
  out.feature_config = dataset.feature_config;
  out.features.reserve(rows.size() * dataset.cols);
  for (std::size_t r : rows) {
    if (r >= dataset.rows) throw Error(ErrorKind::kShape, fmt::format("row {} out of range", r));
    const auto src = dataset.row(r);
    out.features.insert(out.features.end(), src.begin(), src.end());
    out.labels.push_back(dataset.labels[r]);
    if (!dataset.segment_ids.empty()) out.segment_ids.push_back(dataset.segment_ids[r]);
    if (!dataset.scaling_factors.empty()) out.scaling_factors.push_back(dataset.scaling_factors[r]);
  }
  return out;
}

// ---- feature cache ---------------------------------------------------------------

namespace {
constexpr std::string_view kFeatureMagic = "RFDS";
}

std::string serialize_features(const LabeledDataset& dataset) {
  dataset.validate();
  ByteWriter w;
  w.bytes(kFeatureMagic);
  w.u16(kFeatureFormatVersion);
  w.u64(dataset.rows);
  w.u64(dataset.cols);
  w.u8(static_cast<std::uint8_t>(dataset.band_mode));
  w.u8(static_cast<std::uint8_t>(dataset.label_case));
  w.u64(dataset.feature_config.frame_size);
  w.u64(dataset.feature_config.hop);
  w.u64(dataset.feature_config.q);
  w.u8(static_cast<std::uint8_t>(dataset.feature_config.window));
  w.u8(dataset.segment_ids.empty() ? 0 : 1);
  for (const auto& id : dataset.segment_ids) w.str(id);
  for (int l : dataset.labels) w.i32(l);
  for (double s : dataset.scaling_factors) w.f64(s);
  for (double v : dataset.features) w.f64(v);
  return w.buffer();
}

LabeledDataset deserialize_features(std::string_view bytes) {
  ByteReader r(bytes);
  if (r.bytes(4) != kFeatureMagic) throw Error(ErrorKind::kFormat, "not a feature cache (bad magic)");
  const auto version = r.u16();
  if (version != kFeatureFormatVersion) {
    throw Error(ErrorKind::kFormat,
                fmt::format("unsupported feature cache version {} (expected {})", version, kFeatureFormatVersion));
  }
  LabeledDataset ds;
  ds.rows = r.u64();
  ds.cols = r.u64();
  const auto mode = r.u8();
  const auto lcase = r.u8();
  if (mode > 2 || lcase < 1 || lcase > 3) throw Error(ErrorKind::kFormat, "corrupt band mode or schema tag");
  ds.band_mode = static_cast<BandMode>(mode);
  ds.label_case = static_cast<LabelCase>(lcase);
  ds.feature_config.frame_size = r.u64();
  ds.feature_config.hop = r.u64();
  ds.feature_config.q = r.u64();
  const auto window = r.u8();
  if (window > 1) throw Error(ErrorKind::kFormat, "corrupt window tag");
  ds.feature_config.window = static_cast<Window>(window);
  const bool has_ids = r.u8() != 0;

  // Guard the allocation against corrupt dimensions before trusting them.
  if (ds.cols == 0 || ds.rows > r.remaining() / 8 || ds.cols > r.remaining() / 8 ||
      ds.rows * ds.cols > r.remaining() / 8) {
    throw Error(ErrorKind::kFormat, fmt::format("dimensions {} x {} exceed payload", ds.rows, ds.cols));
  }
  if (ds.cols != ds.feature_config.feature_dim(ds.band_mode)) {
    throw Error(ErrorKind::kFormat, fmt::format("width {} does not match band mode and frame size", ds.cols));
  }
  if (has_ids) {
    ds.segment_ids.reserve(ds.rows);
    for (std::size_t i = 0; i < ds.rows; ++i) ds.segment_ids.push_back(r.str());
  }
  ds.labels.resize(ds.rows);
  for (auto& l : ds.labels) l = r.i32();
  if (ds.band_mode == BandMode::kConcatenated) {
    ds.scaling_factors.resize(ds.rows);
    for (auto& s : ds.scaling_factors) s = r.f64();
  }
  ds.features.resize(ds.rows * ds.cols);
  for (auto& v : ds.features) v = r.f64();
  if (r.remaining() != 0) throw Error(ErrorKind::kFormat, fmt::format("{} trailing bytes", r.remaining()));
  try {
    ds.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::kFormat, e.what());
  }
  return ds;
}

void save_features(const LabeledDataset& dataset, const fs::path& path) {
  write_file_atomic(path, serialize_features(dataset));
}

LabeledDataset load_features(const fs::path& path) { return deserialize_features(read_file(path)); }

}  // namespace rfsentry
