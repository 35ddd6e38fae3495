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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfsentry/dataset.hpp"
#include "rfsentry/matrix.hpp"

namespace rfsentry::gbdt {

struct TrainConfig {
  int n_rounds = 100;
  double learning_rate = 0.3;  // η, shrinkage applied to every tree
  int max_depth = 6;
  double reg_lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;
  int n_classes = 2;
  std::uint64_t seed = 0;

  void validate() const;
  // Two classes train one sigmoid-link tree per round; more train one tree
  // per class per round.
  int trees_per_round() const { return n_classes == 2 ? 1 : n_classes; }
};

enum class DefaultDirection : std::uint8_t { kLeft = 0, kRight = 1 };

// Flat node storage; children index into the owning Tree. A node is a leaf
// when feature < 0.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  DefaultDirection default_direction = DefaultDirection::kLeft;  // unused: features are dense
  double weight = 0.0;

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class Tree {
 public:
  Tree() : nodes_(1) {}
  explicit Tree(std::vector<TreeNode> nodes);

  // "feature < threshold" goes left.
  double predict(std::span<const double> row) const;
  int depth() const;
  std::size_t leaf_count() const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  void scale_leaves(double factor);

  friend bool operator==(const Tree&, const Tree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

struct BoostedTree {
  int round = 0;
  int class_id = 0;
  Tree tree;

  friend bool operator==(const BoostedTree&, const BoostedTree&) = default;
};

// Provenance of the features a model was trained on; lets predict rebuild
// feature vectors from raw segments.
struct ModelMetadata {
  LabelCase label_case = LabelCase::kIII;
  BandMode band_mode = BandMode::kLowerOnly;
  FeatureConfig feature_config;
};

struct GbdtModel {
  std::vector<BoostedTree> trees;  // round-major, class-minor
  double base_score = 0.0;
  TrainConfig config;
  std::size_t feature_dim = 0;
  ModelMetadata metadata;

  int n_classes() const { return config.n_classes; }
  int rounds() const;
};

struct GradHess {
  double g = 0.0;
  double h = 0.0;
};

// Softmax cross-entropy statistics: g_c = p_c - [c == y], h_c = p_c (1 - p_c).
std::vector<GradHess> softmax_grad_hess(std::span<const double> logits, int true_class);
void softmax_inplace(std::span<double> logits);

// Logistic statistics for the single-margin binary link.
GradHess sigmoid_grad_hess(double margin, int label);
double sigmoid(double margin);

// -G / (H + λ)
double leaf_weight(double sum_g, double sum_h, double lambda);

double split_gain(double g_left, double h_left, double g_right, double h_right, double lambda, double gamma);

// Per-feature value order of a training matrix, computed once and shared by
// every tree trained on it.
class ColumnIndex {
 public:
  explicit ColumnIndex(MatrixView x);

  const MatrixView& matrix() const { return x_; }
  // Row ids of column j sorted by (value, row).
  std::span<const std::uint32_t> sorted_rows(std::size_t j) const {
    return {order_.data() + j * x_.rows, x_.rows};
  }
  std::span<const double> sorted_values(std::size_t j) const { return {values_.data() + j * x_.rows, x_.rows}; }

 private:
  MatrixView x_;
  std::vector<std::uint32_t> order_;
  std::vector<double> values_;
};

// Exact greedy, level-wise tree growth. Split search runs in parallel over
// features with a fixed-order reduction. Leaf weights are unscaled (no η).
Tree build_tree(const ColumnIndex& index, std::span<const double> g, std::span<const double> h,
                const TrainConfig& config);
Tree build_tree(MatrixView x, std::span<const double> g, std::span<const double> h, const TrainConfig& config);

namespace reference {
// Serial depth-first builder that re-sorts each node's rows. Same split rule
// and tie-break as gbdt::build_tree; kept for equivalence tests and benchmarks.
Tree build_tree(MatrixView x, std::span<const double> g, std::span<const double> h, const TrainConfig& config);
}  // namespace reference

struct TrainingTrace {
  std::vector<double> log_loss;  // mean multiclass log-loss after each round (index 0 = before training)
};

GbdtModel train(MatrixView x, std::span<const int> labels, const TrainConfig& config,
                TrainingTrace* trace = nullptr);
GbdtModel train(const LabeledDataset& dataset, const TrainConfig& config, TrainingTrace* trace = nullptr);

// Raw per-output margins: n_classes values, or one for the binary link.
std::vector<double> predict_margin(const GbdtModel& model, std::span<const double> row);

std::vector<double> predict_proba(const GbdtModel& model, std::span<const double> row);
std::vector<double> predict_proba(const GbdtModel& model, MatrixView x);  // row-major rows x n_classes

int predict(const GbdtModel& model, std::span<const double> row);
std::vector<int> predict(const GbdtModel& model, MatrixView x);

// Lowest index wins ties.
int argmax(std::span<const double> values);

double multiclass_log_loss(std::span<const double> proba, std::span<const int> labels, int n_classes);

inline constexpr std::uint16_t kModelFormatVersion = 1;

std::string serialize_model(const GbdtModel& model);
GbdtModel deserialize_model(std::string_view bytes);
void save_model(const GbdtModel& model, const std::filesystem::path& path);
GbdtModel load_model(const std::filesystem::path& path);

}  // namespace rfsentry::gbdt
