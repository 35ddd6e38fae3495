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

#include <cmath>
#include <filesystem>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rfsentry/error.hpp"
#include "rfsentry/gbdt.hpp"
#include "rfsentry/parallel.hpp"

namespace rfsentry::gbdt {
namespace {

namespace fs = std::filesystem;

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an rfsentry::Error";
  return ErrorKind::kIo;
}

struct Data {
  std::vector<double> x;
  std::vector<int> y;
  std::size_t rows = 0;
  std::size_t cols = 0;
  MatrixView view() const { return {x, rows, cols}; }
};

// Gaussian blobs with a few informative columns and many noise columns.
Data blobs(std::size_t rows, std::size_t cols, int classes, std::uint64_t seed, double separation = 1.5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Data d{std::vector<double>(rows * cols), std::vector<int>(rows), rows, cols};
  for (std::size_t i = 0; i < rows; ++i) {
    const int c = static_cast<int>(i % static_cast<std::size_t>(classes));
    d.y[i] = c;
    for (std::size_t j = 0; j < cols; ++j) {
      double v = noise(rng);
      if (j < 3 && static_cast<int>(j) % classes == c % 3) v += separation;
      if (j == 3) v = std::round(v * 2.0) / 2.0;  // coarse column with many ties
      d.x[i * cols + j] = v;
    }
  }
  return d;
}

TEST(SoftmaxGradHess, UniformLogits) {
  const std::vector<double> z{0.0, 0.0, 0.0};
  const auto gh = softmax_grad_hess(z, 0);
  EXPECT_NEAR(gh[0].g, -2.0 / 3.0, 1e-15);
  EXPECT_NEAR(gh[1].g, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(gh[2].g, 1.0 / 3.0, 1e-15);
  for (const auto& v : gh) EXPECT_NEAR(v.h, 2.0 / 9.0, 1e-15);
}

TEST(SoftmaxGradHess, TwoClassSymmetry) {
  const std::vector<double> z{0.0, 0.0};
  const auto gh = softmax_grad_hess(z, 1);
  EXPECT_DOUBLE_EQ(gh[0].g, 0.5);
  EXPECT_DOUBLE_EQ(gh[1].g, -0.5);
}

TEST(SoftmaxGradHess, MatchesFiniteDifferences) {
  const std::vector<double> z{1.0, -0.5, 0.2};
  const auto gh = softmax_grad_hess(z, 2);
  for (std::size_t c = 0; c < 3; ++c) {
    auto zp = z;
    auto zm = z;
    zp[c] += 1e-6;
    zm[c] -= 1e-6;
    const double fd = (oracle::softmax_loss(zp, 2) - oracle::softmax_loss(zm, 2)) / 2e-6;
    EXPECT_NEAR(gh[c].g, fd, 1e-6);
  }
}

TEST(SoftmaxGradHess, LargeLogitsStayFinite) {
  const std::vector<double> z{800.0, -800.0, 0.0};
  for (const auto& v : softmax_grad_hess(z, 1)) {
    EXPECT_TRUE(std::isfinite(v.g));
    EXPECT_TRUE(std::isfinite(v.h));
  }
}

TEST(Sigmoid, GradientMatchesTwoClassSoftmax) {
  for (double m : {-3.0, -0.2, 0.0, 1.7}) {
    for (int y : {0, 1}) {
      const auto s = sigmoid_grad_hess(m, y);
      const std::vector<double> z{0.0, m};
      const auto soft = softmax_grad_hess(z, y);
      EXPECT_NEAR(s.g, soft[1].g, 1e-15);
      EXPECT_NEAR(s.h, soft[1].h, 1e-15);
    }
  }
}

TEST(LeafWeight, FormulaAndZeroGradient) {
  EXPECT_DOUBLE_EQ(leaf_weight(2.0, 4.0, 1.0), -0.4);
  EXPECT_EQ(leaf_weight(0.0, 3.0, 1.0), 0.0);
  EXPECT_EQ(leaf_weight(0.0, 0.0, 0.5), 0.0);
  EXPECT_EQ(kind_of([] { leaf_weight(1.0, 0.0, 0.0); }), ErrorKind::kDegenerateLeaf);
}

TEST(LeafWeight, BeatsGridSearch) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> gd(-10, 10), hd(0, 10), ld(0.1, 3);
  for (int t = 0; t < 50; ++t) {
    const double g = gd(rng), h = hd(rng), l = ld(rng);
    const auto f = [&](double w) { return g * w + 0.5 * (h + l) * w * w; };
    double best = INFINITY;
    for (int i = 0; i <= 10000; ++i) best = std::min(best, f(-20.0 + 40.0 * i / 10000.0));
    EXPECT_LE(f(leaf_weight(g, h, l)), best + 1e-12);
  }
}

TEST(SplitGain, Examples) {
  // Identical halves gain exactly nothing without regularization; with
  // lambda > 0 the split is strictly penalized.
  EXPECT_DOUBLE_EQ(split_gain(1.5, 2.0, 1.5, 2.0, 0.0, 0.0), 0.0);
  EXPECT_LT(split_gain(1.5, 2.0, 1.5, 2.0, 1.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(split_gain(-2.0, 1.0, 2.0, 1.0, 1.0, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(split_gain(-2.0, 1.0, 2.0, 1.0, 1.0, 0.5), 1.5);
}

TEST(SplitGain, EqualsObjectiveDifference) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> gd(-10, 10), hd(0, 10), ld(0.1, 3), gam(0, 1);
  for (int t = 0; t < 100; ++t) {
    const double gl = gd(rng), hl = hd(rng), gr = gd(rng), hr = hd(rng), l = ld(rng), gamma = gam(rng);
    // Optimal objective value of one leaf: G w* + (H + lambda) w*^2 / 2.
    const auto best = [&](double g, double h) {
      const double w = -g / (h + l);
      return g * w + 0.5 * (h + l) * w * w;
    };
    const double expected = best(gl + gr, hl + hr) - best(gl, hl) - best(gr, hr) - gamma;
    EXPECT_NEAR(split_gain(gl, hl, gr, hr, l, gamma), expected, 1e-10 * std::max(1.0, std::abs(expected)));
  }
}

TrainConfig plain(int depth, double lambda = 0.0) {
  TrainConfig c;
  c.max_depth = depth;
  c.reg_lambda = lambda;
  c.min_child_weight = 0.0;
  return c;
}

TEST(BuildTree, ZeroGradientIsOneZeroLeaf) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> g(4, 0.0), h(4, 1.0);
  const auto tree = build_tree(MatrixView(x, 4, 1), g, h, plain(3, 1.0));
  ASSERT_EQ(tree.nodes().size(), 1u);
  EXPECT_EQ(tree.nodes()[0].weight, 0.0);
}

TEST(BuildTree, SingleSplitAtMidpoint) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> g{-1, -1, 1, 1}, h(4, 1.0);
  const auto tree = build_tree(MatrixView(x, 4, 1), g, h, plain(1));
  // Oracle: enumerate the three candidate thresholds.
  const auto candidates = oracle::stump_candidates(x, g, h, 0.0, 0.0, 0.0);
  ASSERT_EQ(candidates.size(), 3u);
  const auto best = *std::max_element(candidates.begin(), candidates.end(),
                                      [](const auto& a, const auto& b) { return a.gain < b.gain; });
  EXPECT_EQ(best.threshold, 2.5);
  const auto& n = tree.nodes();
  ASSERT_EQ(n.size(), 3u);
  EXPECT_EQ(n[0].feature, 0);
  EXPECT_EQ(n[0].threshold, 2.5);
  // The descent direction is minus the gradient: rows with g = -1 get +1.
  EXPECT_DOUBLE_EQ(n[static_cast<std::size_t>(n[0].left)].weight, 1.0);
  EXPECT_DOUBLE_EQ(n[static_cast<std::size_t>(n[0].right)].weight, -1.0);
}

TEST(BuildTree, XorPatternAtDepthTwo) {
  // A perfectly balanced XOR has zero gain at the root under the exact greedy
  // rule, so one corner carries a slightly larger gradient.
  const std::vector<double> x{0, 0, 0, 1, 1, 0, 1, 1};
  const std::vector<double> g{-1.0, 1.0, 1.0, -1.2};
  const std::vector<double> h(4, 1.0);
  const auto tree = build_tree(MatrixView(x, 4, 2), g, h, plain(2));
  EXPECT_EQ(tree.depth(), 2);
  for (std::size_t i = 0; i < 4; ++i) {
    const double pred = tree.predict(std::span<const double>(x).subspan(2 * i, 2));
    EXPECT_GT(-g[i] * pred, 0.0) << "row " << i;
  }
}

TEST(BuildTree, MinChildWeightAndDepthLimits) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> g{-1, -1, 1, 1}, h(4, 1.0);
  auto cfg = plain(1);
  cfg.min_child_weight = 2.5;
  EXPECT_EQ(build_tree(MatrixView(x, 4, 1), g, h, cfg).nodes().size(), 1u);
  EXPECT_EQ(build_tree(MatrixView(x, 4, 1), g, h, plain(0)).nodes().size(), 1u);
  cfg = plain(1);
  cfg.gamma = 10.0;
  EXPECT_EQ(build_tree(MatrixView(x, 4, 1), g, h, cfg).nodes().size(), 1u);
}

TEST(BuildTree, ParallelMatchesSerialReference) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    auto d = blobs(60 + seed * 7, 40, 3, seed);
    std::vector<double> g(d.rows), h(d.rows);
    for (std::size_t i = 0; i < d.rows; ++i) {
      g[i] = nd(rng);
      h[i] = 0.05 + std::abs(nd(rng));
    }
    TrainConfig cfg;
    cfg.max_depth = 1 + static_cast<int>(seed % 7);
    cfg.min_child_weight = seed % 2 == 0 ? 0.0 : 1.0;
    cfg.reg_lambda = seed % 3 == 0 ? 0.0 : 1.0;
    const auto serial = reference::build_tree(d.view(), g, h, cfg);
    for (int jobs : {1, 4}) {
      set_jobs(jobs);
      EXPECT_EQ(build_tree(d.view(), g, h, cfg), serial) << "seed " << seed << " jobs " << jobs;
    }
    set_jobs(0);
  }
}

TEST(Tree, PredictRoutesStrictlyLessLeft) {
  std::vector<TreeNode> nodes(3);
  nodes[0].feature = 0;
  nodes[0].threshold = 1.0;
  nodes[0].left = 1;
  nodes[0].right = 2;
  nodes[1].weight = -1.0;
  nodes[2].weight = 2.0;
  const Tree t(nodes);
  const double below[] = {0.999};
  const double at[] = {1.0};
  EXPECT_EQ(t.predict(below), -1.0);
  EXPECT_EQ(t.predict(at), 2.0);
  EXPECT_EQ(t.leaf_count(), 2u);
  EXPECT_EQ(t.depth(), 1);
}

TEST(Tree, CanonicalLayoutMakesEqualTreesCompareEqual) {
  // Same tree, children stored in a different order.
  std::vector<TreeNode> a(3), b(3);
  a[0].feature = b[0].feature = 2;
  a[0].threshold = b[0].threshold = 0.5;
  a[0].left = 1;
  a[0].right = 2;
  a[1].weight = 3.0;
  a[2].weight = 4.0;
  b[0].left = 2;
  b[0].right = 1;
  b[2].weight = 3.0;
  b[1].weight = 4.0;
  EXPECT_EQ(Tree(a), Tree(b));
}

TEST(Train, SingleClassDataPredictsThatClass) {
  const auto d = blobs(30, 5, 1, 3);
  TrainConfig cfg;
  cfg.n_rounds = 10;
  cfg.n_classes = 2;
  std::vector<int> ones(d.rows, 1);
  const auto zero_model = train(d.view(), d.y, cfg);
  const auto one_model = train(d.view(), ones, cfg);
  for (int p : predict(zero_model, d.view())) EXPECT_EQ(p, 0);
  for (int p : predict(one_model, d.view())) EXPECT_EQ(p, 1);
}

TEST(Train, SyntheticCaseOneFitsWithinTwentyRounds) {
  const auto corpus = synth_corpus(20, 11, kDefaultSynthLength);
  const auto ds = build_dataset(corpus, BandMode::kLowerOnly, LabelCase::kI, FeatureConfig{});
  ASSERT_EQ(ds.rows, 200u);
  TrainConfig cfg;
  cfg.n_rounds = 20;
  cfg.n_classes = 2;
  const auto model = train(ds, cfg);
  const auto pred = predict(model, ds.view());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.rows; ++i) correct += pred[i] == ds.labels[i];
  EXPECT_GE(static_cast<double>(correct) / ds.rows, 0.99);
  EXPECT_EQ(model.metadata.label_case, LabelCase::kI);
  EXPECT_EQ(model.feature_dim, 1024u);
}

TEST(Train, LossTraceIsNonIncreasing) {
  for (int classes : {2, 4}) {
    const auto d = blobs(80, 12, classes, 21, 0.8);
    TrainConfig cfg;
    cfg.n_rounds = 30;
    cfg.n_classes = classes;
    cfg.min_child_weight = 0.0;
    TrainingTrace trace;
    train(d.view(), d.y, cfg, &trace);
    ASSERT_EQ(trace.log_loss.size(), 31u);
    EXPECT_NEAR(trace.log_loss[0], std::log(static_cast<double>(classes)), 1e-12);
    for (std::size_t r = 1; r < trace.log_loss.size(); ++r) EXPECT_LE(trace.log_loss[r], trace.log_loss[r - 1]) << r;
  }
}

TEST(Train, DeterministicAcrossWorkerCounts) {
  const auto d = blobs(90, 30, 3, 5);
  TrainConfig cfg;
  cfg.n_rounds = 15;
  cfg.n_classes = 3;
  set_jobs(1);
  const auto a = train(d.view(), d.y, cfg);
  set_jobs(4);
  const auto b = train(d.view(), d.y, cfg);
  set_jobs(0);
  EXPECT_EQ(serialize_model(a), serialize_model(b));
}

TEST(Train, ScalingFeaturesLeavesPredictionsUnchanged) {
  const auto d = blobs(120, 8, 4, 8);
  auto scaled = d;
  for (auto& v : scaled.x) v *= 3.7;
  TrainConfig cfg;
  cfg.n_rounds = 20;
  cfg.n_classes = 4;
  EXPECT_EQ(predict(train(d.view(), d.y, cfg), d.view()), predict(train(scaled.view(), scaled.y, cfg), scaled.view()));
}

TEST(Train, RejectsBadInput) {
  const auto d = blobs(10, 3, 2, 1);
  TrainConfig cfg;
  cfg.n_classes = 2;
  std::vector<int> bad = d.y;
  bad[3] = 2;
  EXPECT_EQ(kind_of([&] { train(d.view(), bad, cfg); }), ErrorKind::kSchema);
  EXPECT_EQ(kind_of([&] { train(d.view(), std::span<const int>(d.y).first(5), cfg); }), ErrorKind::kShape);
  cfg.learning_rate = 0.0;
  EXPECT_EQ(kind_of([&] { train(d.view(), d.y, cfg); }), ErrorKind::kConfig);
  cfg = {};
  cfg.n_classes = 1;
  EXPECT_EQ(kind_of([&] { train(d.view(), d.y, cfg); }), ErrorKind::kConfig);
}

GbdtModel single_stump_model() {
  GbdtModel m;
  m.config.n_classes = 3;
  m.config.n_rounds = 1;
  m.feature_dim = 1;
  for (int c = 0; c < 3; ++c) {
    std::vector<TreeNode> nodes(3);
    nodes[0].feature = 0;
    nodes[0].threshold = 0.5;
    nodes[0].left = 1;
    nodes[0].right = 2;
    nodes[1].weight = c == 0 ? 1.0 : 0.0;
    nodes[2].weight = c == 2 ? 2.0 : 0.0;
    m.trees.push_back({0, c, Tree(nodes)});
  }
  return m;
}

TEST(PredictProba, ZeroRoundsIsUniform) {
  const auto d = blobs(20, 4, 5, 2);
  TrainConfig cfg;
  cfg.n_rounds = 0;
  cfg.n_classes = 5;
  const auto m = train(d.view(), d.y, cfg);
  for (double p : predict_proba(m, d.view())) EXPECT_DOUBLE_EQ(p, 0.2);
}

TEST(PredictProba, PiecewiseConstantInTheThreshold) {
  const auto m = single_stump_model();
  const auto softmax3 = [](double a, double b, double c) {
    const double z = std::exp(a) + std::exp(b) + std::exp(c);
    return std::vector<double>{std::exp(a) / z, std::exp(b) / z, std::exp(c) / z};
  };
  for (double x : {-5.0, 0.0, 0.4999}) {
    const auto p = predict_proba(m, std::vector<double>{x});
    const auto e = softmax3(1.0, 0.0, 0.0);
    for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(p[c], e[c], 1e-15);
  }
  for (double x : {0.5, 0.6, 100.0}) {
    const auto p = predict_proba(m, std::vector<double>{x});
    const auto e = softmax3(0.0, 0.0, 2.0);
    for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(p[c], e[c], 1e-15);
  }
}

TEST(PredictProba, IsADistribution) {
  const auto d = blobs(100, 10, 4, 13);
  TrainConfig cfg;
  cfg.n_rounds = 10;
  cfg.n_classes = 4;
  const auto m = train(d.view(), d.y, cfg);
  const auto p = predict_proba(m, d.view());
  for (std::size_t i = 0; i < d.rows; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < 4; ++c) {
      EXPECT_GE(p[i * 4 + c], 0.0);
      EXPECT_LE(p[i * 4 + c], 1.0);
      s += p[i * 4 + c];
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(PredictProba, BinaryLinkEqualsTwoClassSoftmax) {
  const auto d = blobs(80, 6, 2, 17);
  TrainConfig cfg;
  cfg.n_rounds = 12;
  cfg.n_classes = 2;
  const auto m = train(d.view(), d.y, cfg);
  EXPECT_EQ(m.trees.size(), 12u);
  for (std::size_t i = 0; i < d.rows; ++i) {
    const auto margin = predict_margin(m, d.view().row(i));
    ASSERT_EQ(margin.size(), 1u);
    std::vector<double> logits{0.0, margin[0]};
    softmax_inplace(logits);
    const auto p = predict_proba(m, d.view().row(i));
    EXPECT_NEAR(p[0], logits[0], 1e-9);
    EXPECT_NEAR(p[1], logits[1], 1e-9);
  }
}

TEST(Predict, ArgmaxAndTies) {
  const std::vector<double> a{0.2, 0.5, 0.3};
  const std::vector<double> b{0.5, 0.5};
  EXPECT_EQ(argmax(a), 1);
  EXPECT_EQ(argmax(b), 0);
}

TEST(Predict, BatchEqualsRowByRow) {
  const auto d = blobs(64, 9, 3, 23);
  TrainConfig cfg;
  cfg.n_rounds = 8;
  cfg.n_classes = 3;
  const auto m = train(d.view(), d.y, cfg);
  const auto batch = predict(m, d.view());
  for (std::size_t i = 0; i < d.rows; ++i) EXPECT_EQ(batch[i], predict(m, d.view().row(i)));
  const std::vector<double> short_row(3, 0.0);
  EXPECT_EQ(kind_of([&] { predict(m, short_row); }), ErrorKind::kShape);
}

TEST(ModelFile, RoundTripPreservesPredictions) {
  const auto d = blobs(100, 7, 4, 29);
  TrainConfig cfg;
  cfg.n_rounds = 10;
  cfg.n_classes = 4;
  const auto m = train(d.view(), d.y, cfg);
  const auto path = fs::temp_directory_path() / "rfsentry_model_roundtrip.rfgb";
  save_model(m, path);
  const auto back = load_model(path);
  fs::remove(path);
  EXPECT_EQ(back.trees, m.trees);
  EXPECT_EQ(predict_proba(back, d.view()), predict_proba(m, d.view()));
  EXPECT_EQ(serialize_model(back), serialize_model(m));
}

TEST(ModelFile, EmptyForestRoundTrips) {
  GbdtModel m;
  m.config.n_rounds = 0;
  m.config.n_classes = 3;
  m.feature_dim = 11;
  const auto back = deserialize_model(serialize_model(m));
  EXPECT_TRUE(back.trees.empty());
  EXPECT_EQ(back.feature_dim, 11u);
  EXPECT_EQ(back.n_classes(), 3);
}

TEST(ModelFile, CorruptionIsAFormatError) {
  const auto m = single_stump_model();
  auto bytes = serialize_model(m);
  auto bad_magic = bytes;
  bad_magic[1] = 'Z';
  EXPECT_EQ(kind_of([&] { deserialize_model(bad_magic); }), ErrorKind::kFormat);
  auto bad_version = bytes;
  bad_version[4] = 9;
  EXPECT_EQ(kind_of([&] { deserialize_model(bad_version); }), ErrorKind::kFormat);
  EXPECT_EQ(kind_of([&] { deserialize_model(std::string_view(bytes).substr(0, bytes.size() - 3)); }),
            ErrorKind::kFormat);
}

TEST(LogLoss, MatchesDirectComputation) {
  const std::vector<double> p{0.7, 0.3, 0.1, 0.9};
  const std::vector<int> y{0, 0};
  EXPECT_NEAR(multiclass_log_loss(p, y, 2), -(std::log(0.7) + std::log(0.1)) / 2.0, 1e-15);
}

}  // namespace
}  // namespace rfsentry::gbdt
