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
#include <span>
#include <string>
#include <vector>

#include "rfsentry/dataset.hpp"
#include "rfsentry/gbdt.hpp"

namespace rfsentry::eval {

struct FoldAssignment {
  std::vector<int> fold_of;  // row -> fold id in 0..k-1
  int k = 0;
  std::uint64_t seed = 0;

  std::vector<std::size_t> test_rows(int fold) const;
  std::vector<std::size_t> train_rows(int fold) const;
  std::uint64_t fingerprint() const;
};

// Per class: rows shuffled with the seeded generator, then dealt round-robin
// into folds. Dealing continues from where the previous class stopped, so fold
// sizes also differ by at most one overall.
FoldAssignment stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed);

class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int n_classes = 0)
      : n_(n_classes), counts_(static_cast<std::size_t>(n_classes) * static_cast<std::size_t>(n_classes), 0) {}

  int n_classes() const { return n_; }
  std::int64_t operator()(int truth, int predicted) const { return counts_[index(truth, predicted)]; }
  std::int64_t& operator()(int truth, int predicted) { return counts_[index(truth, predicted)]; }
  std::int64_t total() const;
  std::int64_t row_sum(int c) const;
  std::int64_t col_sum(int c) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }
  int n_;
  std::vector<std::int64_t> counts_;
};

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred, int n_classes);

enum class Averaging { kMacro, kMicro };

struct MetricSet {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ConfusionMatrix confusion;
  int undefined_precision = 0;  // classes never predicted (scored 0 under macro)
  int undefined_recall = 0;     // classes absent from the truth (scored 0 under macro)
};

MetricSet compute_metrics(const ConfusionMatrix& confusion, Averaging averaging = Averaging::kMacro);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
};

Summary summarize(std::span<const double> values);

struct CvReport {
  std::vector<MetricSet> per_fold;
  Summary accuracy;
  Summary precision;
  Summary recall;
  Summary f1;
  Averaging averaging = Averaging::kMacro;
  std::uint64_t fold_fingerprint = 0;
  std::uint64_t config_fingerprint = 0;

  std::vector<double> fold_accuracies() const;
};

CvReport cross_validate(const LabeledDataset& dataset, const gbdt::TrainConfig& config, const FoldAssignment& folds,
                        Averaging averaging = Averaging::kMacro);
CvReport cross_validate(const LabeledDataset& dataset, const gbdt::TrainConfig& config, int k,
                        std::uint64_t seed, Averaging averaging = Averaging::kMacro);

struct TTestResult {
  double mean_diff = 0.0;
  double sd_diff = 0.0;
  double t_stat = 0.0;
  int dof = 0;
  double t_critical = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double p_value = 1.0;
  double alpha = 0.05;
  bool rejected = false;
  bool degenerate = false;  // zero spread in the differences
};

// Two-sided paired t-test on a_k - b_k.
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b, double alpha = 0.05);

struct BandComparison {
  LabelCase label_case = LabelCase::kI;
  FoldAssignment folds;
  CvReport lower;
  CvReport upper;
  CvReport both;
  TTestResult lower_vs_upper;
  TTestResult lower_vs_both;
};

struct CompareOptions {
  gbdt::TrainConfig train;
  FeatureConfig features;
  int k = 10;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  Averaging averaging = Averaging::kMacro;
};

// Cross-validates the three band modes on one shared fold assignment.
BandComparison compare_bands(const LabeledDataset& lower, const LabeledDataset& upper, const LabeledDataset& both,
                             const CompareOptions& options);
BandComparison compare_bands(const Manifest& manifest, LabelCase label_case, const CompareOptions& options);

}  // namespace rfsentry::eval
