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

#include "rfsentry/cli.hpp"

#include <cstdlib>
#include <fstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "rfsentry/binary_io.hpp"
#include "rfsentry/error.hpp"
#include "rfsentry/parallel.hpp"
#include "rfsentry/report.hpp"

namespace rfsentry::cli {

using report::Json;

void configure_logging() {
  auto logger = spdlog::get("rfsentry");
  if (!logger) {
    logger = spdlog::stderr_logger_mt("rfsentry");
    spdlog::set_default_logger(logger);
  }
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("RF_SENTRY_LOG")) level = spdlog::level::from_str(env);
  spdlog::set_level(level);
}

namespace {

void ensure_writable_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorKind::kIo, fmt::format("cannot create output directory '{}'", dir.string()));
  }
  const auto probe = dir / ".rfsentry-probe";
  {
    std::ofstream f(probe);
    if (!f) throw Error(ErrorKind::kIo, fmt::format("output directory '{}' is not writable", dir.string()));
  }
  fs::remove(probe, ec);
}

// A directory is taken to be a DroneRF download and scanned by file name.
Manifest manifest_or_scan(const fs::path& path) {
  return fs::is_directory(path) ? manifest_from_dronerf_dir(path) : load_manifest(path);
}

void ensure_parent_dir(const fs::path& file) {
  if (file.empty()) throw Error(ErrorKind::kConfig, "an --out path is required");
  const auto parent = file.parent_path();
  if (!parent.empty()) ensure_writable_dir(parent);
}

fs::path csv_path_for(const fs::path& json_path) {
  auto p = json_path;
  p.replace_extension(".csv");
  return p;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

LabeledDataset load_for_case(const fs::path& path, std::optional<LabelCase> label_case) {
  auto ds = load_features(path);
  if (label_case) ds = relabel(ds, *label_case);
  return ds;
}

}  // namespace

void cmd_synth(const SynthOptions& o, std::ostream& out) {
  if (o.n_per_class == 0) throw Error(ErrorKind::kConfig, "--n-per-class must be >= 1");
  if (o.length == 0) throw Error(ErrorKind::kConfig, "--length must be >= 1");
  if (o.out_dir.empty()) throw Error(ErrorKind::kConfig, "an --out directory is required");
  ensure_writable_dir(o.out_dir);
  ensure_writable_dir(o.out_dir / "segments");

  Manifest manifest;
  manifest.source = DataSource::kSynthetic;
  for (int c = 0; c < kCase3Classes; ++c) {
    for (std::size_t i = 0; i < o.n_per_class; ++i) {
      const auto name = fmt::format("c{}_{:04}", c, i);
      manifest.entries.push_back({name, fs::path("segments") / (name + "_L.csv"),
                                  fs::path("segments") / (name + "_H.csv"), c});
    }
  }
  const auto total = static_cast<std::ptrdiff_t>(manifest.entries.size());
  FirstError errors;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    errors.run(idx, [&] {
      const auto& e = manifest.entries[idx];
      const auto pair = synth_segment(e.case3_label, synth_segment_seed(o.seed, e.case3_label, idx % o.n_per_class),
                                      o.length);
      write_segment(o.out_dir / e.lb_path, pair.lower.samples);
      write_segment(o.out_dir / e.ub_path, pair.upper.samples);
    });
  }
  errors.rethrow();

  auto doc = Json::parse(manifest_to_json(manifest));
  Json generator;
  generator["command"] = "synth";
  generator["n_per_class"] = o.n_per_class;
  generator["seed_data"] = o.seed;
  generator["length"] = o.length;
  doc["generator"] = std::move(generator);
  write_file_atomic(o.out_dir / "manifest.json", dump(doc));
  out << fmt::format("wrote {} segments ({} files) and {}\n", manifest.entries.size(), 2 * manifest.entries.size(),
                     (o.out_dir / "manifest.json").string());
}

void cmd_features(const FeaturesOptions& o, std::ostream& out) {
  o.features.validate();
  ensure_parent_dir(o.out);
  const auto manifest = manifest_or_scan(o.manifest);
  const auto ds = build_dataset(manifest, o.band, o.label_case, o.features);
  save_features(ds, o.out);

  std::vector<int> case3;
  for (const auto& e : manifest.entries) case3.push_back(e.case3_label);
  out << format_class_table(case3, o.label_case);
  out << fmt::format("rows={} d={} band={} -> {}\n", ds.rows, ds.cols, to_string(ds.band_mode), o.out.string());
}

void cmd_train(const TrainOptions& o, std::ostream& out) {
  ensure_parent_dir(o.out);
  const auto ds = load_for_case(o.features, o.label_case);
  auto config = o.train;
  config.n_classes = ds.n_classes();
  const auto model = gbdt::train(ds, config);
  gbdt::save_model(model, o.out);
  const auto predicted = gbdt::predict(model, ds.view());
  const auto metrics = eval::compute_metrics(eval::confusion_matrix(ds.labels, predicted, ds.n_classes()));
  out << fmt::format("trained {} trees on {} x {} (case {}), training accuracy {:.4f} -> {}\n", model.trees.size(),
                     ds.rows, ds.cols, to_string(ds.label_case), metrics.accuracy, o.out.string());
}

void cmd_cv(const CvOptions& o, std::ostream& out) {
  if (o.k < 2) throw Error(ErrorKind::kConfig, fmt::format("--k-folds must be >= 2, got {}", o.k));
  ensure_parent_dir(o.out);
  const auto ds = load_for_case(o.features, o.label_case);
  auto config = o.train;
  config.n_classes = ds.n_classes();
  const auto cv = eval::cross_validate(ds, config, o.k, o.seed_data, o.averaging);

  Json doc;
  doc["command"] = "cv";
  Json cfg;
  cfg["features"] = o.features.generic_string();
  cfg["case"] = to_string(ds.label_case);
  cfg["band"] = to_string(ds.band_mode);
  cfg["feature_config"] = report::to_json(ds.feature_config);
  cfg["train"] = report::to_json(config);
  cfg["k_folds"] = o.k;
  cfg["seed_data"] = o.seed_data;
  doc["config"] = std::move(cfg);
  doc["report"] = report::to_json(cv);
  write_file_atomic(o.out, dump(doc));
  write_file_atomic(csv_path_for(o.out), report::cv_csv(cv, ds.label_case, ds.band_mode));
  out << fmt::format("case {} band {}: accuracy {:.4f} +/- {:.4f}, f1 {:.4f} ({} folds) -> {}\n",
                     to_string(ds.label_case), to_string(ds.band_mode), cv.accuracy.mean, cv.accuracy.std, cv.f1.mean,
                     o.k, o.out.string());
}

void cmd_compare(const CompareOptions& o, std::ostream& out) {
  o.compare.features.validate();
  if (o.compare.k < 2) throw Error(ErrorKind::kConfig, fmt::format("--k-folds must be >= 2, got {}", o.compare.k));
  ensure_parent_dir(o.out);
  const auto manifest = manifest_or_scan(o.manifest);
  auto options = o.compare;
  options.train.n_classes = schema_for(o.label_case).n_classes;
  const auto cmp = eval::compare_bands(manifest, o.label_case, options);

  Json doc;
  doc["command"] = "compare";
  Json cfg;
  cfg["manifest"] = o.manifest.generic_string();
  cfg["case"] = to_string(o.label_case);
  cfg["feature_config"] = report::to_json(options.features);
  cfg["train"] = report::to_json(options.train);
  cfg["k_folds"] = options.k;
  cfg["seed_data"] = options.seed;
  cfg["alpha"] = options.alpha;
  cfg["averaging"] = options.averaging == eval::Averaging::kMacro ? "macro" : "micro";
  cfg["config_fingerprint"] = report::hex64(cmp.lower.config_fingerprint);
  doc["config"] = std::move(cfg);
  doc["comparison"] = report::to_json(cmp);
  write_file_atomic(o.out, dump(doc));
  write_file_atomic(csv_path_for(o.out), report::comparison_csv(cmp));

  out << fmt::format("case {} ({} folds)\n", to_string(o.label_case), options.k);
  const auto line = [&](std::string_view name, const eval::CvReport& r) {
    out << fmt::format("  {:<6} accuracy {:.4f} +/- {:.4f}  f1 {:.4f}\n", name, r.accuracy.mean, r.accuracy.std,
                       r.f1.mean);
  };
  line("lower", cmp.lower);
  line("upper", cmp.upper);
  line("both", cmp.both);
  const auto test_line = [&](std::string_view name, const eval::TTestResult& t) {
    out << fmt::format("  {:<14} mu_d={:+.4f} t={:.3f} dof={} CI=({:.4f}, {:.4f}) {}\n", name, t.mean_diff, t.t_stat,
                       t.dof, t.ci_low, t.ci_high, t.rejected ? "rejected" : "not rejected");
  };
  test_line("lower-vs-upper", cmp.lower_vs_upper);
  test_line("lower-vs-both", cmp.lower_vs_both);
}

void cmd_predict(const PredictOptions& o, std::ostream& out) {
  if (o.features.has_value() == (o.lb.has_value() || o.ub.has_value())) {
    throw Error(ErrorKind::kConfig, "give either --features or both --lb and --ub");
  }
  if (!o.features && (!o.lb || !o.ub)) throw Error(ErrorKind::kConfig, "--lb and --ub must be given together");
  if (o.out) ensure_parent_dir(*o.out);
  const auto model = gbdt::load_model(o.model);
  const auto& schema = schema_for(model.metadata.label_case);
  if (schema.n_classes != model.n_classes()) {
    throw Error(ErrorKind::kSchema, "model class count does not match its label schema");
  }

  std::vector<std::string> ids;
  std::vector<double> rows;
  std::size_t n_rows = 0;
  if (o.features) {
    const auto ds = load_features(*o.features);
    if (ds.cols != model.feature_dim) {
      throw Error(ErrorKind::kShape, fmt::format("features have d={}, model expects d={}", ds.cols, model.feature_dim));
    }
    rows = ds.features;
    n_rows = ds.rows;
    ids = ds.segment_ids;
    if (ids.empty()) {
      for (std::size_t i = 0; i < n_rows; ++i) ids.push_back(fmt::format("row{}", i));
    }
  } else {
    const auto lower = load_segment(*o.lb, Band::kLower);
    const auto upper = load_segment(*o.ub, Band::kUpper);
    const auto fv = extract_features(lower.samples, upper.samples, model.metadata.band_mode,
                                     model.metadata.feature_config);
    if (fv.values.size() != model.feature_dim) {
      throw Error(ErrorKind::kShape,
                  fmt::format("extracted d={}, model expects d={}", fv.values.size(), model.feature_dim));
    }
    rows = fv.values;
    n_rows = 1;
    ids.push_back(lower.segment_id);
  }

  const MatrixView x(rows, n_rows, model.feature_dim);
  const auto proba = gbdt::predict_proba(model, x);
  const auto k = static_cast<std::size_t>(model.n_classes());
  Json results = Json::array();
  for (std::size_t r = 0; r < n_rows; ++r) {
    const auto p = std::span(proba).subspan(r * k, k);
    const int label = gbdt::argmax(p);
    std::string line = fmt::format("{}\t{}", ids[r], schema.class_names[static_cast<std::size_t>(label)]);
    Json probs;
    for (std::size_t c = 0; c < k; ++c) {
      line += fmt::format("\t{}={:.6f}", schema.class_names[c], p[c]);
      probs[schema.class_names[c]] = p[c];
    }
    out << line << "\n";
    Json row;
    row["id"] = ids[r];
    row["label"] = label;
    row["class"] = schema.class_names[static_cast<std::size_t>(label)];
    row["probabilities"] = std::move(probs);
    results.push_back(std::move(row));
  }
  if (o.out) {
    Json doc;
    doc["command"] = "predict";
    Json cfg;
    cfg["model"] = o.model.generic_string();
    cfg["case"] = to_string(model.metadata.label_case);
    cfg["band"] = to_string(model.metadata.band_mode);
    cfg["train"] = report::to_json(model.config);
    doc["config"] = std::move(cfg);
    doc["predictions"] = std::move(results);
    write_file_atomic(*o.out, dump(doc));
  }
}

// ---- argument parsing -----------------------------------------------------------------------

namespace {

void add_train_flags(CLI::App* cmd, gbdt::TrainConfig& c) {
  cmd->add_option("--rounds", c.n_rounds, "Boosting rounds")->capture_default_str();
  cmd->add_option("--eta", c.learning_rate, "Learning rate (shrinkage)")->capture_default_str();
  cmd->add_option("--max-depth", c.max_depth, "Maximum tree depth")->capture_default_str();
  cmd->add_option("--lambda", c.reg_lambda, "L2 leaf regularization")->capture_default_str();
  cmd->add_option("--gamma", c.gamma, "Minimum split gain")->capture_default_str();
  cmd->add_option("--min-child-weight", c.min_child_weight, "Minimum child hessian sum")->capture_default_str();
  cmd->add_option("--seed-train", c.seed, "Training seed")->capture_default_str();
}

struct FeatureFlags {
  std::size_t frame_size = kDefaultFrameSize;
  std::optional<std::size_t> hop;
  std::size_t q = kDefaultSeamBins;
  std::string window = "rectangular";

  void add(CLI::App* cmd) {
    cmd->add_option("--frame-size", frame_size, "DFT frame size N (power of two)")->capture_default_str();
    cmd->add_option("--hop", hop, "Frame hop in samples (default: frame size)");
    cmd->add_option("--q", q, "Seam width in bins for the band scaling factor")->capture_default_str();
    cmd->add_option("--window", window, "Frame window: rectangular or hann")->capture_default_str();
  }

  FeatureConfig resolve() const {
    FeatureConfig c;
    c.frame_size = frame_size;
    c.hop = hop.value_or(frame_size);
    c.q = q;
    c.window = parse_window(window);
    return c;
  }
};

eval::Averaging parse_averaging(const std::string& s) {
  if (s == "macro") return eval::Averaging::kMacro;
  if (s == "micro") return eval::Averaging::kMicro;
  throw Error(ErrorKind::kConfig, fmt::format("unknown averaging '{}' (expected macro or micro)", s));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  configure_logging();
  CLI::App app{"rfsentry: RF-based drone detection and identification"};
  app.require_subcommand(1);
  app.fallthrough();
  int jobs = 0;
  app.add_option("--jobs", jobs, "Worker threads (0 = all cores); results do not depend on it");

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic segment corpus and manifest");
  synth_cmd->add_option("--n-per-class", synth.n_per_class, "Segments per case-III class")->capture_default_str();
  synth_cmd->add_option("--seed-data", synth.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--length", synth.length, "Samples per band per segment")->capture_default_str();
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();

  FeaturesOptions features;
  FeatureFlags features_flags;
  std::string features_band = "lower";
  std::string features_case = "3";
  auto* features_cmd = app.add_subcommand("features", "Extract a feature cache from a manifest");
  features_cmd->add_option("--manifest", features.manifest, "Manifest JSON or DroneRF directory")->required();
  features_cmd->add_option("--band", features_band, "lower, upper or both")->capture_default_str();
  features_cmd->add_option("--case", features_case, "Label case 1, 2 or 3")->capture_default_str();
  features_flags.add(features_cmd);
  features_cmd->add_option("--out", features.out, "Feature cache path")->required();

  TrainOptions train;
  std::string train_case;
  auto* train_cmd = app.add_subcommand("train", "Train a model on a feature cache");
  train_cmd->add_option("--features", train.features, "Feature cache")->required();
  train_cmd->add_option("--case", train_case, "Label case 1, 2 or 3 (default: the cache's)");
  add_train_flags(train_cmd, train.train);
  train_cmd->add_option("--out", train.out, "Model path")->required();

  CvOptions cv;
  std::string cv_case;
  std::string cv_averaging = "macro";
  auto* cv_cmd = app.add_subcommand("cv", "Stratified k-fold cross-validation on a feature cache");
  cv_cmd->add_option("--features", cv.features, "Feature cache")->required();
  cv_cmd->add_option("--case", cv_case, "Label case 1, 2 or 3 (default: the cache's)");
  add_train_flags(cv_cmd, cv.train);
  cv_cmd->add_option("--k-folds", cv.k, "Number of folds")->capture_default_str();
  cv_cmd->add_option("--seed-data", cv.seed_data, "Fold shuffling seed")->capture_default_str();
  cv_cmd->add_option("--averaging", cv_averaging, "macro or micro")->capture_default_str();
  cv_cmd->add_option("--out", cv.out, "Report JSON path (CSV written alongside)")->required();

  CompareOptions compare;
  FeatureFlags compare_flags;
  std::string compare_case = "1";
  std::string compare_averaging = "macro";
  auto* compare_cmd = app.add_subcommand("compare", "Cross-validate lower/upper/both bands with paired t-tests");
  compare_cmd->add_option("--manifest", compare.manifest, "Manifest JSON or DroneRF directory")->required();
  compare_cmd->add_option("--case", compare_case, "Label case 1, 2 or 3")->capture_default_str();
  compare_flags.add(compare_cmd);
  add_train_flags(compare_cmd, compare.compare.train);
  compare_cmd->add_option("--k-folds", compare.compare.k, "Number of folds")->capture_default_str();
  compare_cmd->add_option("--alpha", compare.compare.alpha, "t-test significance level")->capture_default_str();
  compare_cmd->add_option("--seed-data", compare.compare.seed, "Fold shuffling seed")->capture_default_str();
  compare_cmd->add_option("--averaging", compare_averaging, "macro or micro")->capture_default_str();
  compare_cmd->add_option("--out", compare.out, "Report JSON path (CSV written alongside)")->required();

  PredictOptions predict;
  auto* predict_cmd = app.add_subcommand("predict", "Classify a feature cache or one raw segment pair");
  predict_cmd->add_option("--model", predict.model, "Model path")->required();
  predict_cmd->add_option("--features", predict.features, "Feature cache");
  predict_cmd->add_option("--lb", predict.lb, "Lower-band segment file");
  predict_cmd->add_option("--ub", predict.ub, "Upper-band segment file");
  predict_cmd->add_option("--out", predict.out, "Optional JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kConfig);
  }

  try {
    if (jobs < 0) throw Error(ErrorKind::kConfig, "--jobs must be >= 0");
    set_jobs(jobs);
    if (synth_cmd->parsed()) {
      cmd_synth(synth, out);
    } else if (features_cmd->parsed()) {
      features.band = parse_band_mode(features_band);
      features.label_case = parse_label_case(features_case);
      features.features = features_flags.resolve();
      cmd_features(features, out);
    } else if (train_cmd->parsed()) {
      if (!train_case.empty()) train.label_case = parse_label_case(train_case);
      cmd_train(train, out);
    } else if (cv_cmd->parsed()) {
      if (!cv_case.empty()) cv.label_case = parse_label_case(cv_case);
      cv.averaging = parse_averaging(cv_averaging);
      cmd_cv(cv, out);
    } else if (compare_cmd->parsed()) {
      compare.label_case = parse_label_case(compare_case);
      compare.compare.features = compare_flags.resolve();
      compare.compare.averaging = parse_averaging(compare_averaging);
      cmd_compare(compare, out);
    } else if (predict_cmd->parsed()) {
      cmd_predict(predict, out);
    }
  } catch (const Error& e) {
    err << "rfsentry: " << e.what() << "\n";
    set_jobs(0);
    return static_cast<int>(exit_code_for(e.kind()));
  } catch (const std::exception& e) {
    err << "rfsentry: internal error: " << e.what() << "\n";
    set_jobs(0);
    return static_cast<int>(ExitCode::kInternal);
  }
  set_jobs(0);
  return static_cast<int>(ExitCode::kOk);
}

}  // namespace rfsentry::cli
