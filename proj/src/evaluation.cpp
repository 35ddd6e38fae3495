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

#include "rfsentry/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <fmt/format.h>

#include "rfsentry/binary_io.hpp"
#include "rfsentry/error.hpp"
#include "rfsentry/parallel.hpp"
#include "rfsentry/student_t.hpp"

namespace rfsentry::eval {

// ---- folds ----------------------------------------------------------------------------

std::vector<std::size_t> FoldAssignment::test_rows(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::train_rows(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

std::uint64_t FoldAssignment::fingerprint() const {
  ByteWriter w;
  w.i32(k);
  w.u64(seed);
  for (int f : fold_of) w.i32(f);
  return fnv1a64(w.buffer());
}

namespace {

// Unbiased draw in [0, bound) via rejection; std distributions are not
// reproducible across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

}  // namespace

FoldAssignment stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::kConfig, fmt::format("need at least 2 folds, got {}", k));
  if (static_cast<std::size_t>(k) > labels.size()) {
    throw Error(ErrorKind::kConfig, fmt::format("{} folds requested for {} rows", k, labels.size()));
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  FoldAssignment out;
  out.k = k;
  out.seed = seed;
  out.fold_of.assign(labels.size(), -1);
  std::mt19937_64 rng(seed);
  std::size_t next_fold = 0;
  for (auto& [label, rows] : by_class) {
    for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[bounded(rng, i)]);
    for (std::size_t row : rows) {
      out.fold_of[row] = static_cast<int>(next_fold);
      next_fold = (next_fold + 1) % static_cast<std::size_t>(k);
    }
  }
  return out;
}

// ---- metrics ------------------------------------------------------------------------------

std::int64_t ConfusionMatrix::total() const {
  std::int64_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

std::int64_t ConfusionMatrix::row_sum(int c) const {
  std::int64_t t = 0;
  for (int j = 0; j < n_; ++j) t += (*this)(c, j);
  return t;
}

std::int64_t ConfusionMatrix::col_sum(int c) const {
  std::int64_t t = 0;
  for (int i = 0; i < n_; ++i) t += (*this)(i, c);
  return t;
}

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred, int n_classes) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorKind::kShape, fmt::format("{} true labels vs {} predictions", y_true.size(), y_pred.size()));
  }
  ConfusionMatrix m(n_classes);
  for (std::size_t t = 0; t < y_true.size(); ++t) {
    if (y_true[t] < 0 || y_true[t] >= n_classes || y_pred[t] < 0 || y_pred[t] >= n_classes) {
      throw Error(ErrorKind::kShape, fmt::format("label pair ({}, {}) at {} outside 0..{}", y_true[t], y_pred[t], t,
                                                 n_classes - 1));
    }
    ++m(y_true[t], y_pred[t]);
  }
  return m;
}

MetricSet compute_metrics(const ConfusionMatrix& confusion, Averaging averaging) {
  const std::int64_t total = confusion.total();
  if (total == 0) throw Error(ErrorKind::kEmptyEvaluation, "confusion matrix is empty");
  const int n = confusion.n_classes();

  MetricSet out;
  out.confusion = confusion;
  std::int64_t trace = 0;
  for (int c = 0; c < n; ++c) trace += confusion(c, c);
  out.accuracy = static_cast<double>(trace) / static_cast<double>(total);

  double sum_p = 0.0;
  double sum_r = 0.0;
  double sum_f = 0.0;
  for (int c = 0; c < n; ++c) {
    const auto tp = static_cast<double>(confusion(c, c));
    const auto predicted = confusion.col_sum(c);
    const auto actual = confusion.row_sum(c);
    double p = 0.0;
    double r = 0.0;
    if (predicted > 0) {
      p = tp / static_cast<double>(predicted);
    } else {
      ++out.undefined_precision;
    }
    if (actual > 0) {
      r = tp / static_cast<double>(actual);
    } else {
      ++out.undefined_recall;
    }
    sum_p += p;
    sum_r += r;
    sum_f += (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  if (averaging == Averaging::kMacro) {
    out.precision = sum_p / n;
    out.recall = sum_r / n;
    out.f1 = sum_f / n;
  } else {
    // Single-label multiclass: micro precision = micro recall = accuracy.
    out.precision = out.recall = out.f1 = out.accuracy;
  }
  return out;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  // Equal values must give exactly zero spread; the rounded mean of n copies
  // of v is not always v.
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
    s.mean = values.front();
    return s;
  }
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::vector<double> CvReport::fold_accuracies() const {
  std::vector<double> out;
  out.reserve(per_fold.size());
  for (const auto& m : per_fold) out.push_back(m.accuracy);
  return out;
}

// ---- cross-validation ----------------------------------------------------------------------

namespace {

std::uint64_t config_fingerprint(const LabeledDataset& ds, const gbdt::TrainConfig& c, const FoldAssignment& folds,
                                 Averaging averaging) {
  const auto& f = ds.feature_config;
  const auto canonical = fmt::format(
      "rounds={};eta={};depth={};lambda={};gamma={};mcw={};classes={};seed={};k={};fold_seed={};avg={};"
      "band={};case={};frame={};hop={};q={};window={}",
      c.n_rounds, c.learning_rate, c.max_depth, c.reg_lambda, c.gamma, c.min_child_weight, c.n_classes, c.seed,
      folds.k, folds.seed, averaging == Averaging::kMacro ? "macro" : "micro", to_string(ds.band_mode),
      to_string(ds.label_case), f.frame_size, f.hop, f.q, to_string(f.window));
  return fnv1a64(canonical);
}

}  // namespace

CvReport cross_validate(const LabeledDataset& dataset, const gbdt::TrainConfig& config, const FoldAssignment& folds,
                        Averaging averaging) {
  dataset.validate();
  config.validate();
  if (folds.k < 2) throw Error(ErrorKind::kConfig, fmt::format("need at least 2 folds, got {}", folds.k));
  if (folds.fold_of.size() != dataset.rows) {
    throw Error(ErrorKind::kConfig, fmt::format("fold assignment covers {} rows, dataset has {}",
                                                folds.fold_of.size(), dataset.rows));
  }
  std::vector<std::vector<std::size_t>> test(static_cast<std::size_t>(folds.k));
  std::vector<std::vector<std::size_t>> train(static_cast<std::size_t>(folds.k));
  for (int f = 0; f < folds.k; ++f) {
    test[static_cast<std::size_t>(f)] = folds.test_rows(f);
    train[static_cast<std::size_t>(f)] = folds.train_rows(f);
    if (test[static_cast<std::size_t>(f)].empty()) {
      throw Error(ErrorKind::kConfig, fmt::format("fold {} has no test rows", f));
    }
    if (train[static_cast<std::size_t>(f)].empty()) {
      throw Error(ErrorKind::kConfig, fmt::format("fold {} leaves no training rows", f));
    }
  }

  CvReport report;
  report.averaging = averaging;
  report.per_fold.resize(static_cast<std::size_t>(folds.k));
  FirstError errors;
#pragma omp parallel for schedule(dynamic)
  for (int f = 0; f < folds.k; ++f) {
    const auto fi = static_cast<std::size_t>(f);
    errors.run(fi, [&] {
      const auto train_set = select_rows(dataset, train[fi]);
      const auto test_set = select_rows(dataset, test[fi]);
      const auto model = gbdt::train(train_set, config);
      const auto predicted = gbdt::predict(model, test_set.view());
      report.per_fold[fi] =
          compute_metrics(confusion_matrix(test_set.labels, predicted, dataset.n_classes()), averaging);
    });
  }
  errors.rethrow();

  std::vector<double> acc;
  std::vector<double> prec;
  std::vector<double> rec;
  std::vector<double> f1;
  for (const auto& m : report.per_fold) {
    acc.push_back(m.accuracy);
    prec.push_back(m.precision);
    rec.push_back(m.recall);
    f1.push_back(m.f1);
  }
  report.accuracy = summarize(acc);
  report.precision = summarize(prec);
  report.recall = summarize(rec);
  report.f1 = summarize(f1);
  report.fold_fingerprint = folds.fingerprint();
  report.config_fingerprint = config_fingerprint(dataset, config, folds, averaging);
  return report;
}

CvReport cross_validate(const LabeledDataset& dataset, const gbdt::TrainConfig& config, int k, std::uint64_t seed,
                        Averaging averaging) {
  return cross_validate(dataset, config, stratified_kfold(dataset.labels, k, seed), averaging);
}

// ---- paired t-test ----------------------------------------------------------------------------

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kShape, fmt::format("paired samples differ in length: {} vs {}", a.size(), b.size()));
  }
  if (a.size() < 2) throw Error(ErrorKind::kInsufficientData, "paired t-test needs at least 2 pairs");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::kConfig, fmt::format("alpha {} outside (0, 1)", alpha));

  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const Summary s = summarize(d);
  const auto k = static_cast<double>(d.size());

  TTestResult out;
  out.alpha = alpha;
  out.dof = static_cast<int>(d.size()) - 1;
  out.mean_diff = s.mean;
  out.sd_diff = s.std;
  out.t_critical = stats::student_t_quantile(1.0 - alpha / 2.0, out.dof);

  if (s.std == 0.0) {
    out.degenerate = true;
    out.ci_low = out.ci_high = s.mean;
    if (s.mean == 0.0) {
      out.t_stat = 0.0;
      out.p_value = 1.0;
      out.rejected = false;
    } else {
      out.t_stat = std::copysign(std::numeric_limits<double>::infinity(), s.mean);
      out.p_value = 0.0;
      out.rejected = true;
    }
    return out;
  }

  const double se = s.std / std::sqrt(k);
  out.t_stat = s.mean / se;
  out.ci_low = s.mean - out.t_critical * se;
  out.ci_high = s.mean + out.t_critical * se;
  out.p_value = 2.0 * stats::student_t_cdf(-std::fabs(out.t_stat), out.dof);
  out.rejected = !(out.ci_low <= 0.0 && 0.0 <= out.ci_high);
  return out;
}

// ---- band comparison ------------------------------------------------------------------------------

BandComparison compare_bands(const LabeledDataset& lower, const LabeledDataset& upper, const LabeledDataset& both,
                             const CompareOptions& options) {
  if (lower.labels != upper.labels || lower.labels != both.labels) {
    throw Error(ErrorKind::kShape, "band datasets must share rows and labels");
  }
  BandComparison out;
  out.label_case = lower.label_case;
  out.folds = stratified_kfold(lower.labels, options.k, options.seed);
  out.lower = cross_validate(lower, options.train, out.folds, options.averaging);
  out.upper = cross_validate(upper, options.train, out.folds, options.averaging);
  out.both = cross_validate(both, options.train, out.folds, options.averaging);
  const auto acc_lower = out.lower.fold_accuracies();
  out.lower_vs_upper = paired_ttest(acc_lower, out.upper.fold_accuracies(), options.alpha);
  out.lower_vs_both = paired_ttest(acc_lower, out.both.fold_accuracies(), options.alpha);
  return out;
}

BandComparison compare_bands(const Manifest& manifest, LabelCase label_case, const CompareOptions& options) {
  const auto lower = build_dataset(manifest, BandMode::kLowerOnly, label_case, options.features);
  const auto upper = build_dataset(manifest, BandMode::kUpperOnly, label_case, options.features);
  const auto both = build_dataset(manifest, BandMode::kConcatenated, label_case, options.features);
  return compare_bands(lower, upper, both, options);
}

}  // namespace rfsentry::eval
