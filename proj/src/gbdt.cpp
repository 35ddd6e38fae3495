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

#include "rfsentry/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "rfsentry/binary_io.hpp"
#include "rfsentry/error.hpp"
#include "rfsentry/parallel.hpp"

namespace rfsentry::gbdt {

void TrainConfig::validate() const {
  if (n_rounds < 0) throw Error(ErrorKind::kConfig, fmt::format("rounds must be >= 0, got {}", n_rounds));
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw Error(ErrorKind::kConfig, fmt::format("learning rate {} outside (0, 1]", learning_rate));
  }
  if (max_depth < 0 || max_depth > 64) {
    throw Error(ErrorKind::kConfig, fmt::format("max depth {} outside [0, 64]", max_depth));
  }
  if (!(reg_lambda >= 0.0) || !std::isfinite(reg_lambda)) {
    throw Error(ErrorKind::kConfig, fmt::format("lambda {} must be >= 0", reg_lambda));
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::kConfig, fmt::format("gamma {} must be >= 0", gamma));
  }
  if (!(min_child_weight >= 0.0) || !std::isfinite(min_child_weight)) {
    throw Error(ErrorKind::kConfig, fmt::format("min child weight {} must be >= 0", min_child_weight));
  }
  if (n_classes < 2) throw Error(ErrorKind::kConfig, fmt::format("need at least 2 classes, got {}", n_classes));
}

// ---- trees -------------------------------------------------------------------------

namespace {

void append_preorder(const std::vector<TreeNode>& in, std::int32_t id, std::vector<TreeNode>& out, int depth) {
  if (id < 0 || static_cast<std::size_t>(id) >= in.size() || depth > 128) {
    throw Error(ErrorKind::kFormat, "malformed tree structure");
  }
  const TreeNode& src = in[static_cast<std::size_t>(id)];
  const auto slot = out.size();
  out.push_back(src);
  if (src.is_leaf()) {
    out[slot].left = out[slot].right = -1;
    return;
  }
  out[slot].left = static_cast<std::int32_t>(out.size());
  append_preorder(in, src.left, out, depth + 1);
  out[slot].right = static_cast<std::int32_t>(out.size());
  append_preorder(in, src.right, out, depth + 1);
}

int depth_of(const std::vector<TreeNode>& nodes, std::int32_t id) {
  const auto& n = nodes[static_cast<std::size_t>(id)];
  if (n.is_leaf()) return 0;
  return 1 + std::max(depth_of(nodes, n.left), depth_of(nodes, n.right));
}

}  // namespace

// Nodes are stored in pre-order so that structurally equal trees compare equal
// regardless of how they were grown.
Tree::Tree(std::vector<TreeNode> nodes) {
  if (nodes.empty()) throw Error(ErrorKind::kFormat, "tree without nodes");
  nodes_.reserve(nodes.size());
  append_preorder(nodes, 0, nodes_, 0);
  if (nodes_.size() != nodes.size()) throw Error(ErrorKind::kFormat, "tree has unreachable nodes");
}

double Tree::predict(std::span<const double> row) const {
  std::size_t id = 0;
  while (!nodes_[id].is_leaf()) {
    const auto& n = nodes_[id];
    id = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
  }
  return nodes_[id].weight;
}

int Tree::depth() const { return depth_of(nodes_, 0); }

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const auto& n) { return n.is_leaf(); }));
}

void Tree::scale_leaves(double factor) {
  for (auto& n : nodes_) {
    if (n.is_leaf()) n.weight *= factor;
  }
}

int GbdtModel::rounds() const {
  const int per_round = config.trees_per_round();
  return static_cast<int>(trees.size()) / per_round;
}

// ---- objective ------------------------------------------------------------------------

void softmax_inplace(std::span<double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& v : logits) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : logits) v /= total;
}

std::vector<GradHess> softmax_grad_hess(std::span<const double> logits, int true_class) {
  std::vector<double> p(logits.begin(), logits.end());
  softmax_inplace(p);
  std::vector<GradHess> out(p.size());
  for (std::size_t c = 0; c < p.size(); ++c) {
    out[c].g = p[c] - (static_cast<int>(c) == true_class ? 1.0 : 0.0);
    out[c].h = p[c] * (1.0 - p[c]);
  }
  return out;
}

double sigmoid(double margin) {
  if (margin >= 0) return 1.0 / (1.0 + std::exp(-margin));
  const double e = std::exp(margin);
  return e / (1.0 + e);
}

GradHess sigmoid_grad_hess(double margin, int label) {
  const double p = sigmoid(margin);
  return {p - static_cast<double>(label), p * (1.0 - p)};
}

double leaf_weight(double sum_g, double sum_h, double lambda) {
  const double denom = sum_h + lambda;
  if (!(denom > 0.0)) {
    throw Error(ErrorKind::kDegenerateLeaf, fmt::format("H + lambda = {} is not positive", denom));
  }
  return -sum_g / denom;
}

double split_gain(double g_left, double h_left, double g_right, double h_right, double lambda, double gamma) {
  const double g = g_left + g_right;
  const double h = h_left + h_right;
  return 0.5 * (g_left * g_left / (h_left + lambda) + g_right * g_right / (h_right + lambda) -
                g * g / (h + lambda)) -
         gamma;
}

// ---- split search ------------------------------------------------------------------------

ColumnIndex::ColumnIndex(MatrixView x) : x_(x), order_(x.rows * x.cols), values_(x.rows * x.cols) {
  if (x.rows > std::numeric_limits<std::uint32_t>::max()) throw Error(ErrorKind::kShape, "too many rows");
  const auto cols = static_cast<std::ptrdiff_t>(x.cols);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t jj = 0; jj < cols; ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    auto* order = order_.data() + j * x_.rows;
    std::iota(order, order + x_.rows, 0u);
    std::sort(order, order + x_.rows, [&](std::uint32_t a, std::uint32_t b) {
      const double va = x_(a, j);
      const double vb = x_(b, j);
      return va < vb || (va == vb && a < b);
    });
    for (std::size_t t = 0; t < x_.rows; ++t) values_[j * x_.rows + t] = x_(order[t], j);
  }
}

namespace {

struct Candidate {
  double gain = 0.0;
  std::int32_t feature = -1;
  double threshold = 0.0;
};

struct ScanState {
  double g_left = 0.0;
  double h_left = 0.0;
  double last = 0.0;
  bool has_last = false;
};

double split_point(double below, double above) {
  double mid = std::midpoint(below, above);
  // Adjacent doubles: the midpoint may round down onto `below`.
  if (mid <= below) mid = above;
  return mid;
}

void check_stats(std::size_t rows, std::span<const double> g, std::span<const double> h) {
  if (rows == 0) throw Error(ErrorKind::kShape, "cannot grow a tree on zero rows");
  if (g.size() != rows || h.size() != rows) {
    throw Error(ErrorKind::kShape, fmt::format("{} rows but {} gradients / {} hessians", rows, g.size(), h.size()));
  }
}

}  // namespace

Tree build_tree(const ColumnIndex& index, std::span<const double> g, std::span<const double> h,
                const TrainConfig& config) {
  const MatrixView& x = index.matrix();
  check_stats(x.rows, g, h);
  const std::size_t n = x.rows;
  const std::size_t d = x.cols;

  std::vector<TreeNode> nodes(1);
  std::vector<double> node_g(1, 0.0);
  std::vector<double> node_h(1, 0.0);
  std::vector<std::int32_t> position(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    node_g[0] += g[r];
    node_h[0] += h[r];
  }

  std::vector<std::int32_t> frontier = {0};
  for (int depth = 0; depth < config.max_depth && !frontier.empty(); ++depth) {
    const std::size_t m = frontier.size();
    std::vector<std::int32_t> slot_of(nodes.size(), -1);
    for (std::size_t s = 0; s < m; ++s) slot_of[static_cast<std::size_t>(frontier[s])] = static_cast<std::int32_t>(s);

    std::vector<Candidate> best(d * m);
#pragma omp parallel
    {
      std::vector<ScanState> state(m);
#pragma omp for schedule(static)
      for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(d); ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        std::fill(state.begin(), state.end(), ScanState{});
        const auto rows = index.sorted_rows(j);
        const auto vals = index.sorted_values(j);
        Candidate* out = best.data() + j * m;
        for (std::size_t t = 0; t < n; ++t) {
          const std::uint32_t r = rows[t];
          const std::int32_t node = position[r];
          if (node < 0) continue;
          const std::int32_t s = slot_of[static_cast<std::size_t>(node)];
          if (s < 0) continue;
          ScanState& st = state[static_cast<std::size_t>(s)];
          const double v = vals[t];
          if (st.has_last && v > st.last) {
            const double gr = node_g[static_cast<std::size_t>(node)] - st.g_left;
            const double hr = node_h[static_cast<std::size_t>(node)] - st.h_left;
            if (st.h_left >= config.min_child_weight && hr >= config.min_child_weight) {
              const double gain = split_gain(st.g_left, st.h_left, gr, hr, config.reg_lambda, config.gamma);
              Candidate& c = out[static_cast<std::size_t>(s)];
              if (gain > c.gain) c = {gain, static_cast<std::int32_t>(j), split_point(st.last, v)};
            }
          }
          st.g_left += g[r];
          st.h_left += h[r];
          st.last = v;
          st.has_last = true;
        }
      }
    }

    std::vector<std::int32_t> next;
    std::vector<Candidate> chosen(m);
    for (std::size_t s = 0; s < m; ++s) {
      for (std::size_t j = 0; j < d; ++j) {
        const Candidate& c = best[j * m + s];
        if (c.feature >= 0 && c.gain > chosen[s].gain) chosen[s] = c;
      }
    }
    for (std::size_t s = 0; s < m; ++s) {
      if (chosen[s].feature < 0) continue;
      const auto id = static_cast<std::size_t>(frontier[s]);
      const auto left = static_cast<std::int32_t>(nodes.size());
      nodes.resize(nodes.size() + 2);
      node_g.resize(nodes.size(), 0.0);
      node_h.resize(nodes.size(), 0.0);
      nodes[id].feature = chosen[s].feature;
      nodes[id].threshold = chosen[s].threshold;
      nodes[id].left = left;
      nodes[id].right = left + 1;
      next.push_back(left);
      next.push_back(left + 1);
    }
    for (std::size_t r = 0; r < n; ++r) {
      const std::int32_t node = position[r];
      if (node < 0) continue;
      const auto& parent = nodes[static_cast<std::size_t>(node)];
      if (slot_of.size() <= static_cast<std::size_t>(node) || slot_of[static_cast<std::size_t>(node)] < 0) continue;
      if (parent.is_leaf()) {
        position[r] = -1;  // finalized
        continue;
      }
      const std::int32_t child =
          x(r, static_cast<std::size_t>(parent.feature)) < parent.threshold ? parent.left : parent.right;
      position[r] = child;
      node_g[static_cast<std::size_t>(child)] += g[r];
      node_h[static_cast<std::size_t>(child)] += h[r];
    }
    frontier = std::move(next);
  }

  for (std::size_t id = 0; id < nodes.size(); ++id) {
    if (nodes[id].is_leaf()) nodes[id].weight = leaf_weight(node_g[id], node_h[id], config.reg_lambda);
  }
  return Tree(std::move(nodes));
}

Tree build_tree(MatrixView x, std::span<const double> g, std::span<const double> h, const TrainConfig& config) {
  check_stats(x.rows, g, h);
  return build_tree(ColumnIndex(x), g, h, config);
}

// ---- boosting -----------------------------------------------------------------------------

double multiclass_log_loss(std::span<const double> proba, std::span<const int> labels, int n_classes) {
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = proba[i * static_cast<std::size_t>(n_classes) + static_cast<std::size_t>(labels[i])];
    total -= std::log(std::max(p, std::numeric_limits<double>::min()));
  }
  return total / static_cast<double>(labels.size());
}

namespace {

// Floors hessians so a saturated leaf with lambda = 0 never divides by zero.
constexpr double kMinHessian = 1e-16;

void margins_to_proba(std::span<const double> margins, int n_classes, std::span<double> out) {
  if (n_classes == 2 && margins.size() == 1) {
    const double p = sigmoid(margins[0]);
    out[0] = 1.0 - p;
    out[1] = p;
    return;
  }
  std::copy(margins.begin(), margins.end(), out.begin());
  softmax_inplace(out);
}

double margins_loss(std::span<const double> margins, std::span<const int> labels, int n_classes, int per_row) {
  std::vector<double> proba(labels.size() * static_cast<std::size_t>(n_classes));
  for (std::size_t r = 0; r < labels.size(); ++r) {
    margins_to_proba(margins.subspan(r * static_cast<std::size_t>(per_row), static_cast<std::size_t>(per_row)),
                     n_classes, std::span(proba).subspan(r * static_cast<std::size_t>(n_classes),
                                                         static_cast<std::size_t>(n_classes)));
  }
  return multiclass_log_loss(proba, labels, n_classes);
}

}  // namespace

GbdtModel train(MatrixView x, std::span<const int> labels, const TrainConfig& config, TrainingTrace* trace) {
  config.validate();
  if (x.rows == 0) throw Error(ErrorKind::kInsufficientData, "cannot train on an empty dataset");
  if (labels.size() != x.rows) {
    throw Error(ErrorKind::kShape, fmt::format("{} labels for {} rows", labels.size(), x.rows));
  }
  for (std::size_t r = 0; r < x.rows; ++r) {
    if (labels[r] < 0 || labels[r] >= config.n_classes) {
      throw Error(ErrorKind::kSchema, fmt::format("row {} label {} outside 0..{}", r, labels[r], config.n_classes - 1));
    }
    for (double v : x.row(r)) {
      if (!std::isfinite(v)) throw Error(ErrorKind::kShape, fmt::format("non-finite feature in row {}", r));
    }
  }

  GbdtModel model;
  model.config = config;
  model.feature_dim = x.cols;
  model.base_score = 0.0;

  const std::size_t n = x.rows;
  const int per_round = config.trees_per_round();
  const auto k = static_cast<std::size_t>(per_round);
  std::vector<double> margins(n * k, model.base_score);
  if (trace) trace->log_loss = {margins_loss(margins, labels, config.n_classes, per_round)};
  if (config.n_rounds == 0) return model;

  const ColumnIndex index(x);
  std::vector<std::vector<double>> grad(k, std::vector<double>(n));
  std::vector<std::vector<double>> hess(k, std::vector<double>(n));
  std::vector<Tree> round_trees(k);
  model.trees.reserve(static_cast<std::size_t>(config.n_rounds) * k);

  for (int round = 0; round < config.n_rounds; ++round) {
    for (std::size_t r = 0; r < n; ++r) {
      if (per_round == 1) {
        const auto gh = sigmoid_grad_hess(margins[r], labels[r]);
        grad[0][r] = gh.g;
        hess[0][r] = std::max(gh.h, kMinHessian);
      } else {
        const auto gh = softmax_grad_hess(std::span(margins).subspan(r * k, k), labels[r]);
        for (std::size_t c = 0; c < k; ++c) {
          grad[c][r] = gh[c].g;
          hess[c][r] = std::max(gh[c].h, kMinHessian);
        }
      }
    }

    FirstError errors;
#pragma omp parallel for schedule(dynamic) if (per_round > 1)
    for (std::ptrdiff_t cc = 0; cc < static_cast<std::ptrdiff_t>(k); ++cc) {
      const auto c = static_cast<std::size_t>(cc);
      errors.run(c, [&] {
        round_trees[c] = build_tree(index, grad[c], hess[c], config);
        round_trees[c].scale_leaves(config.learning_rate);
      });
    }
    errors.rethrow();

    for (std::size_t r = 0; r < n; ++r) {
      const auto row = x.row(r);
      for (std::size_t c = 0; c < k; ++c) margins[r * k + c] += round_trees[c].predict(row);
    }
    for (std::size_t c = 0; c < k; ++c) model.trees.push_back({round, static_cast<int>(c), round_trees[c]});
    if (trace) trace->log_loss.push_back(margins_loss(margins, labels, config.n_classes, per_round));
  }
  return model;
}

GbdtModel train(const LabeledDataset& dataset, const TrainConfig& config, TrainingTrace* trace) {
  if (dataset.n_classes() != config.n_classes) {
    throw Error(ErrorKind::kConfig, fmt::format("dataset has {} classes but config declares {}",
                                                dataset.n_classes(), config.n_classes));
  }
  GbdtModel model = train(dataset.view(), dataset.labels, config, trace);
  model.metadata = {dataset.label_case, dataset.band_mode, dataset.feature_config};
  return model;
}

// ---- inference ------------------------------------------------------------------------------

std::vector<double> predict_margin(const GbdtModel& model, std::span<const double> row) {
  if (row.size() != model.feature_dim) {
    throw Error(ErrorKind::kShape, fmt::format("feature vector has {} values, model expects d={}", row.size(),
                                               model.feature_dim));
  }
  std::vector<double> margins(static_cast<std::size_t>(model.config.trees_per_round()), model.base_score);
  for (const auto& bt : model.trees) margins[static_cast<std::size_t>(bt.class_id)] += bt.tree.predict(row);
  return margins;
}

std::vector<double> predict_proba(const GbdtModel& model, std::span<const double> row) {
  const auto margins = predict_margin(model, row);
  std::vector<double> proba(static_cast<std::size_t>(model.n_classes()));
  margins_to_proba(margins, model.n_classes(), proba);
  return proba;
}

std::vector<double> predict_proba(const GbdtModel& model, MatrixView x) {
  if (x.cols != model.feature_dim) {
    throw Error(ErrorKind::kShape, fmt::format("feature matrix has {} columns, model expects d={}", x.cols,
                                               model.feature_dim));
  }
  const auto k = static_cast<std::size_t>(model.n_classes());
  std::vector<double> out(x.rows * k);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t rr = 0; rr < static_cast<std::ptrdiff_t>(x.rows); ++rr) {
    const auto r = static_cast<std::size_t>(rr);
    const auto p = predict_proba(model, x.row(r));
    std::copy(p.begin(), p.end(), out.begin() + static_cast<std::ptrdiff_t>(r * k));
  }
  return out;
}

int argmax(std::span<const double> values) {
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

int predict(const GbdtModel& model, std::span<const double> row) { return argmax(predict_proba(model, row)); }

std::vector<int> predict(const GbdtModel& model, MatrixView x) {
  const auto proba = predict_proba(model, x);
  const auto k = static_cast<std::size_t>(model.n_classes());
  std::vector<int> out(x.rows);
  for (std::size_t r = 0; r < x.rows; ++r) out[r] = argmax(std::span(proba).subspan(r * k, k));
  return out;
}

// ---- model container -------------------------------------------------------------------------

namespace {

constexpr std::string_view kModelMagic = "RFGB";

void write_node(ByteWriter& w, const std::vector<TreeNode>& nodes, std::size_t id) {
  const auto& n = nodes[id];
  if (n.is_leaf()) {
    w.u8(0);
    w.f64(n.weight);
    return;
  }
  w.u8(1);
  w.u32(static_cast<std::uint32_t>(n.feature));
  w.f64(n.threshold);
  w.u8(static_cast<std::uint8_t>(n.default_direction));
  write_node(w, nodes, static_cast<std::size_t>(n.left));
  write_node(w, nodes, static_cast<std::size_t>(n.right));
}

std::int32_t read_node(ByteReader& r, std::vector<TreeNode>& nodes, std::size_t feature_dim, int depth) {
  if (depth > 64) throw Error(ErrorKind::kFormat, "tree deeper than 64 levels");
  const auto id = static_cast<std::int32_t>(nodes.size());
  nodes.emplace_back();
  const auto tag = r.u8();
  if (tag == 0) {
    nodes.back().weight = r.f64();
    return id;
  }
  if (tag != 1) throw Error(ErrorKind::kFormat, fmt::format("bad node tag {}", tag));
  const auto feature = r.u32();
  if (feature >= feature_dim) throw Error(ErrorKind::kFormat, fmt::format("split feature {} >= d", feature));
  const double threshold = r.f64();
  const auto dir = r.u8();
  if (dir > 1) throw Error(ErrorKind::kFormat, "bad default direction");
  const auto left = read_node(r, nodes, feature_dim, depth + 1);
  const auto right = read_node(r, nodes, feature_dim, depth + 1);
  auto& node = nodes[static_cast<std::size_t>(id)];
  node.feature = static_cast<std::int32_t>(feature);
  node.threshold = threshold;
  node.default_direction = static_cast<DefaultDirection>(dir);
  node.left = left;
  node.right = right;
  return id;
}

}  // namespace

std::string serialize_model(const GbdtModel& model) {
  ByteWriter w;
  w.bytes(kModelMagic);
  w.u16(kModelFormatVersion);
  const auto& c = model.config;
  w.i32(c.n_rounds);
  w.f64(c.learning_rate);
  w.i32(c.max_depth);
  w.f64(c.reg_lambda);
  w.f64(c.gamma);
  w.f64(c.min_child_weight);
  w.i32(c.n_classes);
  w.u64(c.seed);
  w.f64(model.base_score);
  w.u64(model.feature_dim);
  w.u8(static_cast<std::uint8_t>(model.metadata.label_case));
  w.u8(static_cast<std::uint8_t>(model.metadata.band_mode));
  w.u64(model.metadata.feature_config.frame_size);
  w.u64(model.metadata.feature_config.hop);
  w.u64(model.metadata.feature_config.q);
  w.u8(static_cast<std::uint8_t>(model.metadata.feature_config.window));
  w.u64(model.trees.size());
  for (const auto& bt : model.trees) {
    w.i32(bt.round);
    w.i32(bt.class_id);
    w.u32(static_cast<std::uint32_t>(bt.tree.nodes().size()));
    write_node(w, bt.tree.nodes(), 0);
  }
  return w.buffer();
}

GbdtModel deserialize_model(std::string_view bytes) {
  ByteReader r(bytes);
  if (r.bytes(4) != kModelMagic) throw Error(ErrorKind::kFormat, "not a model file (bad magic)");
  const auto version = r.u16();
  if (version != kModelFormatVersion) {
    throw Error(ErrorKind::kFormat,
                fmt::format("unsupported model version {} (expected {})", version, kModelFormatVersion));
  }
  GbdtModel m;
  auto& c = m.config;
  c.n_rounds = r.i32();
  c.learning_rate = r.f64();
  c.max_depth = r.i32();
  c.reg_lambda = r.f64();
  c.gamma = r.f64();
  c.min_child_weight = r.f64();
  c.n_classes = r.i32();
  c.seed = r.u64();
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::kFormat, e.what());
  }
  m.base_score = r.f64();
  m.feature_dim = r.u64();
  const auto lcase = r.u8();
  const auto mode = r.u8();
  if (lcase < 1 || lcase > 3 || mode > 2) throw Error(ErrorKind::kFormat, "corrupt metadata tags");
  m.metadata.label_case = static_cast<LabelCase>(lcase);
  m.metadata.band_mode = static_cast<BandMode>(mode);
  m.metadata.feature_config.frame_size = r.u64();
  m.metadata.feature_config.hop = r.u64();
  m.metadata.feature_config.q = r.u64();
  const auto window = r.u8();
  if (window > 1) throw Error(ErrorKind::kFormat, "corrupt window tag");
  m.metadata.feature_config.window = static_cast<Window>(window);

  const auto n_trees = r.u64();
  const auto per_round = static_cast<std::uint64_t>(c.trees_per_round());
  if (n_trees % per_round != 0 || n_trees > r.remaining()) {
    throw Error(ErrorKind::kFormat, fmt::format("tree count {} inconsistent with {} outputs", n_trees, per_round));
  }
  m.trees.reserve(n_trees);
  for (std::uint64_t t = 0; t < n_trees; ++t) {
    BoostedTree bt;
    bt.round = r.i32();
    bt.class_id = r.i32();
    if (bt.class_id < 0 || static_cast<std::uint64_t>(bt.class_id) >= per_round) {
      throw Error(ErrorKind::kFormat, fmt::format("tree class {} out of range", bt.class_id));
    }
    const auto expected = r.u32();
    std::vector<TreeNode> nodes;
    read_node(r, nodes, m.feature_dim, 0);
    if (nodes.size() != expected) throw Error(ErrorKind::kFormat, "tree node count mismatch");
    bt.tree = Tree(std::move(nodes));
    m.trees.push_back(std::move(bt));
  }
  if (r.remaining() != 0) throw Error(ErrorKind::kFormat, fmt::format("{} trailing bytes", r.remaining()));
  return m;
}

void save_model(const GbdtModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_model(model));
}

GbdtModel load_model(const std::filesystem::path& path) { return deserialize_model(read_file(path)); }

}  // namespace rfsentry::gbdt
