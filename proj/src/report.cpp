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

#include "rfsentry/report.hpp"

#include <cmath>

#include <fmt/format.h>

namespace rfsentry::report {

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

Json to_json(const gbdt::TrainConfig& c) {
  Json j;
  j["rounds"] = c.n_rounds;
  j["eta"] = c.learning_rate;
  j["max_depth"] = c.max_depth;
  j["lambda"] = c.reg_lambda;
  j["gamma"] = c.gamma;
  j["min_child_weight"] = c.min_child_weight;
  j["n_classes"] = c.n_classes;
  j["seed_train"] = c.seed;
  return j;
}

Json to_json(const FeatureConfig& c) {
  Json j;
  j["frame_size"] = c.frame_size;
  j["hop"] = c.hop;
  j["q"] = c.q;
  j["window"] = to_string(c.window);
  return j;
}

Json to_json(const eval::MetricSet& m) {
  Json j;
  j["accuracy"] = m.accuracy;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  Json rows = Json::array();
  for (int i = 0; i < m.confusion.n_classes(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < m.confusion.n_classes(); ++k) row.push_back(m.confusion(i, k));
    rows.push_back(std::move(row));
  }
  j["confusion"] = std::move(rows);
  j["undefined_precision_classes"] = m.undefined_precision;
  j["undefined_recall_classes"] = m.undefined_recall;
  return j;
}

namespace {

Json summary_json(const eval::Summary& s) {
  Json j;
  j["mean"] = s.mean;
  j["std"] = s.std;
  return j;
}

constexpr std::string_view kMetricNames[] = {"accuracy", "precision", "recall", "f1"};

double metric_value(const eval::MetricSet& m, std::string_view name) {
  if (name == "accuracy") return m.accuracy;
  if (name == "precision") return m.precision;
  if (name == "recall") return m.recall;
  return m.f1;
}

}  // namespace

Json to_json(const eval::CvReport& r) {
  Json j;
  j["k"] = r.per_fold.size();
  j["averaging"] = r.averaging == eval::Averaging::kMacro ? "macro" : "micro";
  j["std_kind"] = "sample";
  j["fold_fingerprint"] = hex64(r.fold_fingerprint);
  j["config_fingerprint"] = hex64(r.config_fingerprint);
  Json summary;
  summary["accuracy"] = summary_json(r.accuracy);
  summary["precision"] = summary_json(r.precision);
  summary["recall"] = summary_json(r.recall);
  summary["f1"] = summary_json(r.f1);
  j["summary"] = std::move(summary);
  Json per_metric;
  for (auto name : kMetricNames) {
    Json values = Json::array();
    for (const auto& m : r.per_fold) values.push_back(metric_value(m, name));
    per_metric[std::string(name)] = std::move(values);
  }
  j["per_fold"] = std::move(per_metric);
  Json folds = Json::array();
  for (const auto& m : r.per_fold) folds.push_back(to_json(m)["confusion"]);
  j["per_fold_confusion"] = std::move(folds);
  return j;
}

Json to_json(const eval::TTestResult& t) {
  Json j;
  j["mean_diff"] = t.mean_diff;
  j["sd_diff"] = t.sd_diff;
  // Infinite t (zero spread, nonzero mean) is not representable in JSON.
  if (std::isfinite(t.t_stat)) {
    j["t_stat"] = t.t_stat;
  } else {
    j["t_stat"] = t.t_stat > 0 ? "inf" : "-inf";
  }
  j["dof"] = t.dof;
  j["t_critical"] = t.t_critical;
  j["ci_low"] = t.ci_low;
  j["ci_high"] = t.ci_high;
  j["p_value"] = t.p_value;
  j["alpha"] = t.alpha;
  j["rejected"] = t.rejected;
  j["degenerate"] = t.degenerate;
  return j;
}

Json to_json(const eval::BandComparison& c) {
  Json j;
  j["case"] = to_string(c.label_case);
  Json folds;
  folds["k"] = c.folds.k;
  folds["seed_data"] = c.folds.seed;
  folds["fingerprint"] = hex64(c.folds.fingerprint());
  folds["pairing"] = "shared fold partition across band modes";
  j["folds"] = std::move(folds);
  Json cv;
  cv["lower"] = to_json(c.lower);
  cv["upper"] = to_json(c.upper);
  cv["both"] = to_json(c.both);
  j["cv"] = std::move(cv);
  Json tests = Json::array();
  Json lu = to_json(c.lower_vs_upper);
  lu["comparison"] = "lower_vs_upper";
  tests.push_back(std::move(lu));
  Json lb = to_json(c.lower_vs_both);
  lb["comparison"] = "lower_vs_both";
  tests.push_back(std::move(lb));
  j["ttests"] = std::move(tests);
  return j;
}

namespace {

void append_rows(std::string& out, const eval::CvReport& r, LabelCase label_case, BandMode band) {
  for (std::size_t f = 0; f < r.per_fold.size(); ++f) {
    for (auto name : kMetricNames) {
      out += fmt::format("{},{},{},{},{}\n", to_string(label_case), to_string(band), f, name,
                         metric_value(r.per_fold[f], name));
    }
  }
}

constexpr std::string_view kCsvHeader = "case,band,fold,metric,value\n";

}  // namespace

std::string cv_csv(const eval::CvReport& report, LabelCase label_case, BandMode band) {
  std::string out(kCsvHeader);
  append_rows(out, report, label_case, band);
  return out;
}

std::string comparison_csv(const eval::BandComparison& c) {
  std::string out(kCsvHeader);
  append_rows(out, c.lower, c.label_case, BandMode::kLowerOnly);
  append_rows(out, c.upper, c.label_case, BandMode::kUpperOnly);
  append_rows(out, c.both, c.label_case, BandMode::kConcatenated);
  return out;
}

}  // namespace rfsentry::report
