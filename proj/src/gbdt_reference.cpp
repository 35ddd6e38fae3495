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

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "rfsentry/error.hpp"
#include "rfsentry/gbdt.hpp"

namespace rfsentry::gbdt::reference {

namespace {

struct Builder {
  MatrixView x;
  std::span<const double> g;
  std::span<const double> h;
  const TrainConfig& config;
  std::vector<TreeNode> nodes;

  // `rows` is ascending; node sums are taken in that order.
  std::int32_t grow(const std::vector<std::uint32_t>& rows, int depth) {
    const auto id = static_cast<std::int32_t>(nodes.size());
    nodes.emplace_back();
    double sum_g = 0.0;
    double sum_h = 0.0;
    for (auto r : rows) {
      sum_g += g[r];
      sum_h += h[r];
    }

    double best_gain = 0.0;
    std::int32_t best_feature = -1;
    double best_threshold = 0.0;
    if (depth < config.max_depth) {
      std::vector<std::uint32_t> order(rows);
      for (std::size_t j = 0; j < x.cols; ++j) {
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
          const double va = x(a, j);
          const double vb = x(b, j);
          return va < vb || (va == vb && a < b);
        });
        double gl = 0.0;
        double hl = 0.0;
        for (std::size_t t = 0; t < order.size(); ++t) {
          const double v = x(order[t], j);
          if (t > 0) {
            const double prev = x(order[t - 1], j);
            if (v > prev) {
              const double gr = sum_g - gl;
              const double hr = sum_h - hl;
              if (hl >= config.min_child_weight && hr >= config.min_child_weight) {
                const double gain = split_gain(gl, hl, gr, hr, config.reg_lambda, config.gamma);
                if (gain > best_gain) {
                  best_gain = gain;
                  best_feature = static_cast<std::int32_t>(j);
                  double mid = std::midpoint(prev, v);
                  if (mid <= prev) mid = v;
                  best_threshold = mid;
                }
              }
            }
          }
          gl += g[order[t]];
          hl += h[order[t]];
        }
      }
    }

    if (best_feature < 0) {
      nodes[static_cast<std::size_t>(id)].weight = leaf_weight(sum_g, sum_h, config.reg_lambda);
      return id;
    }
    std::vector<std::uint32_t> left;
    std::vector<std::uint32_t> right;
    for (auto r : rows) {
      (x(r, static_cast<std::size_t>(best_feature)) < best_threshold ? left : right).push_back(r);
    }
    const auto l = grow(left, depth + 1);
    const auto rr = grow(right, depth + 1);
    auto& node = nodes[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = rr;
    return id;
  }
};

}  // namespace

Tree build_tree(MatrixView x, std::span<const double> g, std::span<const double> h, const TrainConfig& config) {
  if (x.rows == 0) throw Error(ErrorKind::kShape, "cannot grow a tree on zero rows");
  if (g.size() != x.rows || h.size() != x.rows) {
    throw Error(ErrorKind::kShape, fmt::format("{} rows but {} gradients / {} hessians", x.rows, g.size(), h.size()));
  }
  Builder b{x, g, h, config, {}};
  std::vector<std::uint32_t> rows(x.rows);
  std::iota(rows.begin(), rows.end(), 0u);
  b.grow(rows, 0);
  return Tree(std::move(b.nodes));
}

}  // namespace rfsentry::gbdt::reference
