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

// Independent reference computations used as test oracles. Nothing here calls
// into the library's numeric kernels, so agreement is meaningful.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace rfsentry::oracle {

// Direct O(N^2) evaluation of X[k] = sum_n x[n] exp(-i 2 pi n k / N) in long
// double, with the phase reduced modulo N before the trig call.
inline std::vector<std::complex<double>> naive_dft(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  for (std::size_t k = 0; k < n; ++k) {
    long double re = 0.0L;
    long double im = 0.0L;
    for (std::size_t t = 0; t < n; ++t) {
      const long double angle = two_pi * static_cast<long double>((t * k) % n) / static_cast<long double>(n);
      re += static_cast<long double>(x[t]) * std::cos(angle);
      im -= static_cast<long double>(x[t]) * std::sin(angle);
    }
    out[k] = {static_cast<double>(re), static_cast<double>(im)};
  }
  return out;
}

inline std::vector<double> uniform_noise(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

// Textbook paired t-test with the critical value taken from Boost.Math.
struct TextbookTTest {
  double mean = 0.0;
  double sd = 0.0;
  double t = 0.0;
  double t_crit = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

inline TextbookTTest textbook_paired_t(std::span<const double> a, std::span<const double> b, double alpha) {
  const std::size_t k = a.size();
  std::vector<double> d(k);
  for (std::size_t i = 0; i < k; ++i) d[i] = a[i] - b[i];
  double sum = 0.0;
  for (double v : d) sum += v;
  TextbookTTest r;
  r.mean = sum / static_cast<double>(k);
  double ss = 0.0;
  for (double v : d) ss += (v - r.mean) * (v - r.mean);
  r.sd = std::sqrt(ss / static_cast<double>(k - 1));
  const double se = r.sd / std::sqrt(static_cast<double>(k));
  r.t = r.mean / se;
  boost::math::students_t dist(static_cast<double>(k - 1));
  r.t_crit = boost::math::quantile(dist, 1.0 - alpha / 2.0);
  r.ci_low = r.mean - r.t_crit * se;
  r.ci_high = r.mean + r.t_crit * se;
  return r;
}

inline double softmax_loss(std::span<const double> logits, int y) {
  double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double v : logits) z += std::exp(v - m);
  return -(logits[static_cast<std::size_t>(y)] - m - std::log(z));
}

// Split statistics of a 1-D dataset at one threshold ("x < thr" goes left).
struct StumpSplit {
  double threshold = 0.0;
  double gain = 0.0;
  double left = 0.0;  // unscaled leaf weights
  double right = 0.0;
  bool admissible = false;  // both children meet min_child_weight
};

inline StumpSplit stump_at(std::span<const double> x, std::span<const double> g, std::span<const double> h,
                           double lambda, double gamma, double min_child_weight, double thr) {
  double gl = 0.0, hl = 0.0, gt = 0.0, ht = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    gt += g[i];
    ht += h[i];
    if (x[i] < thr) {
      gl += g[i];
      hl += h[i];
    }
  }
  const double gr = gt - gl;
  const double hr = ht - hl;
  const auto score = [&](double gs, double hs) { return gs * gs / (hs + lambda); };
  StumpSplit s;
  s.threshold = thr;
  s.gain = 0.5 * (score(gl, hl) + score(gr, hr) - score(gt, ht)) - gamma;
  s.left = -gl / (hl + lambda);
  s.right = -gr / (hr + lambda);
  s.admissible = hl >= min_child_weight && hr >= min_child_weight;
  return s;
}

// Every admissible midpoint between consecutive distinct values, found by
// exhaustive enumeration.
inline std::vector<StumpSplit> stump_candidates(std::span<const double> x, std::span<const double> g,
                                                std::span<const double> h, double lambda, double gamma,
                                                double min_child_weight) {
  std::vector<double> values(x.begin(), x.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<StumpSplit> out;
  for (std::size_t v = 0; v + 1 < values.size(); ++v) {
    double thr = 0.5 * (values[v] + values[v + 1]);
    if (!(thr > values[v])) thr = values[v + 1];
    const auto s = stump_at(x, g, h, lambda, gamma, min_child_weight, thr);
    if (s.admissible) out.push_back(s);
  }
  return out;
}

// Counts by direct scan over every (truth, prediction) cell.
inline std::vector<std::vector<long>> naive_confusion(std::span<const int> t, std::span<const int> p, int n) {
  std::vector<std::vector<long>> m(static_cast<std::size_t>(n), std::vector<long>(static_cast<std::size_t>(n), 0));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] == a && p[i] == b) ++m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      }
    }
  }
  return m;
}

// Leave-one-out nearest-centroid accuracy under Euclidean distance.
inline double nearest_centroid_loo_accuracy(std::span<const double> x, std::size_t rows, std::size_t cols,
                                            std::span<const int> labels, int n_classes) {
  std::vector<std::vector<double>> sum(static_cast<std::size_t>(n_classes), std::vector<double>(cols, 0.0));
  std::vector<double> count(static_cast<std::size_t>(n_classes), 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    count[c] += 1.0;
    for (std::size_t j = 0; j < cols; ++j) sum[c][j] += x[i * cols + j];
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_c = -1;
    for (int c = 0; c < n_classes; ++c) {
      const auto cu = static_cast<std::size_t>(c);
      const bool own = labels[i] == c;
      const double n = count[cu] - (own ? 1.0 : 0.0);
      if (n <= 0.0) continue;
      double d = 0.0;
      for (std::size_t j = 0; j < cols; ++j) {
        const double centroid = (sum[cu][j] - (own ? x[i * cols + j] : 0.0)) / n;
        const double diff = x[i * cols + j] - centroid;
        d += diff * diff;
      }
      if (d < best) {
        best = d;
        best_c = c;
      }
    }
    if (best_c == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(rows);
}

}  // namespace rfsentry::oracle
