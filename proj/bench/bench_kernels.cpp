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

// Kernel timings. The thread-count argument on the parallel benchmarks is
// passed to set_jobs; on a single-core machine the numbers only show overhead.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "rfsentry/dataset.hpp"
#include "rfsentry/gbdt.hpp"
#include "rfsentry/parallel.hpp"
#include "rfsentry/signal_spectrum.hpp"

namespace {

using namespace rfsentry;

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 100.0);
  std::vector<double> out(n);
  for (auto& v : out) v = dist(rng);
  return out;
}

void BM_Fft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = noise(n, 1);
  std::vector<Complex> buf(n);
  for (auto _ : state) {
    for (std::size_t i = 0; i < n; ++i) buf[i] = x[i];
    fft_inplace(buf);
    benchmark::DoNotOptimize(buf.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Fft)->RangeMultiplier(4)->Range(256, 1 << 14)->Complexity(benchmark::oNLogN);

// Direct O(N^2) transform with a precomputed twiddle table, as a baseline.
void BM_NaiveDft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = noise(n, 1);
  std::vector<Complex> twiddle(n);
  for (std::size_t k = 0; k < n; ++k) {
    twiddle[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  }
  std::vector<Complex> out(n);
  for (auto _ : state) {
    for (std::size_t k = 0; k < n; ++k) {
      Complex acc = 0.0;
      for (std::size_t t = 0; t < n; ++t) acc += x[t] * twiddle[(k * t) % n];
      out[k] = acc;
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NaiveDft)->RangeMultiplier(4)->Range(256, 4096)->Complexity(benchmark::oNSquared);

void BM_SegmentSpectrum(benchmark::State& state) {
  const auto x = noise(8 * kDefaultFrameSize, 2);
  const FeatureConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(segment_spectrum(x, Band::kLower, config));
}
BENCHMARK(BM_SegmentSpectrum);

void BM_BuildDataset(benchmark::State& state) {
  set_jobs(static_cast<int>(state.range(0)));
  const auto corpus = synth_corpus(4, 0, kDefaultSynthLength);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_dataset(corpus, BandMode::kConcatenated, LabelCase::kIII, FeatureConfig{}));
  }
  set_jobs(0);
}
BENCHMARK(BM_BuildDataset)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

struct TreeFixture {
  LabeledDataset data;
  std::vector<double> g;
  std::vector<double> h;

  TreeFixture() {
    data = build_dataset(synth_corpus(20, 3, 4 * kDefaultFrameSize), BandMode::kLowerOnly, LabelCase::kIII,
                         FeatureConfig{});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (std::size_t i = 0; i < data.rows; ++i) {
      const double p = u(rng);
      g.push_back(p - (data.labels[i] == 0 ? 1.0 : 0.0));
      h.push_back(p * (1.0 - p));
    }
  }
};

const TreeFixture& tree_fixture() {
  static const TreeFixture fixture;
  return fixture;
}

void BM_BuildTreeReference(benchmark::State& state) {
  const auto& f = tree_fixture();
  const gbdt::TrainConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(gbdt::reference::build_tree(f.data.view(), f.g, f.h, config));
}
BENCHMARK(BM_BuildTreeReference)->Unit(benchmark::kMillisecond);

void BM_BuildTreeIndexed(benchmark::State& state) {
  set_jobs(static_cast<int>(state.range(0)));
  const auto& f = tree_fixture();
  const gbdt::TrainConfig config;
  const gbdt::ColumnIndex index(f.data.view());
  for (auto _ : state) benchmark::DoNotOptimize(gbdt::build_tree(index, f.g, f.h, config));
  set_jobs(0);
}
BENCHMARK(BM_BuildTreeIndexed)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ColumnIndex(benchmark::State& state) {
  const auto& f = tree_fixture();
  for (auto _ : state) benchmark::DoNotOptimize(gbdt::ColumnIndex(f.data.view()));
}
BENCHMARK(BM_ColumnIndex)->Unit(benchmark::kMillisecond);

void BM_TrainTenRounds(benchmark::State& state) {
  const auto& f = tree_fixture();
  gbdt::TrainConfig config;
  config.n_rounds = 10;
  config.n_classes = f.data.n_classes();
  for (auto _ : state) benchmark::DoNotOptimize(gbdt::train(f.data, config));
}
BENCHMARK(BM_TrainTenRounds)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
