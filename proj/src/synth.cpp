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

#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "rfsentry/dataset.hpp"
#include "rfsentry/error.hpp"

namespace rfsentry {

namespace {

// Counter-based generator: every draw is a pure function of its key, so
// segments can be produced in any order or in parallel.
constexpr std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t key(std::uint64_t a, std::uint64_t b) { return splitmix(a ^ splitmix(b)); }

double uniform01(std::uint64_t k) { return static_cast<double>(splitmix(k) >> 11) * 0x1.0p-53; }

double gaussian(std::uint64_t stream, std::uint64_t index) {
  const double u1 = 1.0 - uniform01(key(stream, 2 * index));
  const double u2 = uniform01(key(stream, 2 * index + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Bin positions refer to a 2048-point frame (1024 bins per band).
constexpr double kGridSize = 2048.0;
constexpr double kNoiseSigma = 40.0;

struct Tone {
  double bin;
  double amplitude;
};

enum class DroneType { kNone, kBebop, kAr, kPhantom };

DroneType type_of(int class_id) {
  if (class_id == 0) return DroneType::kNone;
  if (class_id <= 4) return DroneType::kBebop;
  if (class_id <= 8) return DroneType::kAr;
  return DroneType::kPhantom;
}

int mode_of(int class_id) {
  if (class_id == 0) return 0;
  if (class_id <= 4) return class_id;
  if (class_id <= 8) return class_id - 4;
  return 1;
}

// Control-link carriers shared by every drone.
constexpr std::array<double, 3> kLinkLower = {64, 448, 832};
constexpr std::array<double, 2> kLinkUpper = {128, 576};

// Per-type base tones; the upper band shares only the first position.
constexpr std::array<std::array<double, 3>, 3> kTypeLower = {{{150, 300, 610}, {190, 350, 700}, {230, 400, 770}}};
constexpr std::array<std::array<double, 2>, 3> kTypeUpper = {{{150, 700}, {260, 760}, {310, 820}}};

// Operational modes share their type's tones and differ in comb spacing.
constexpr std::array<double, 4> kCombSpacing = {5, 7, 9, 11};
constexpr int kCombTeeth = 3;

struct BandPlan {
  double link_amplitude;
  double type_amplitude;
  double comb_amplitude;
};

constexpr BandPlan kLowerPlan{30.0, 25.0, 2.4};
constexpr BandPlan kUpperPlan{20.0, 15.0, 1.1};

std::vector<Tone> tones_for(int class_id, Band band) {
  std::vector<Tone> tones;
  const auto type = type_of(class_id);
  if (type == DroneType::kNone) return tones;
  const auto& plan = band == Band::kLower ? kLowerPlan : kUpperPlan;
  const auto t = static_cast<std::size_t>(type) - 1;

  if (band == Band::kLower) {
    for (double b : kLinkLower) tones.push_back({b, plan.link_amplitude});
    for (double b : kTypeLower[t]) tones.push_back({b, plan.type_amplitude});
  } else {
    for (double b : kLinkUpper) tones.push_back({b, plan.link_amplitude});
    for (double b : kTypeUpper[t]) tones.push_back({b, plan.type_amplitude});
  }
  const double base = band == Band::kLower ? kTypeLower[t][1] : kTypeUpper[t][1];
  const double spacing = kCombSpacing[static_cast<std::size_t>(mode_of(class_id) - 1)];
  for (int j = 1; j <= kCombTeeth; ++j) tones.push_back({base + 12.0 + j * spacing, plan.comb_amplitude});
  return tones;
}

std::vector<double> synth_band(int class_id, std::uint64_t seed, Band band, std::size_t length) {
  const auto band_id = static_cast<std::uint64_t>(band);
  const std::uint64_t noise_stream = key(key(key(0x5eed, seed), static_cast<std::uint64_t>(class_id)), band_id);
  // Recording conditions depend on the seed only: classes sharing a seed share
  // gain, drift and noise level.
  const std::uint64_t cond_stream = key(key(0xc0d17, seed), band_id);
  const double gain = 0.7 + 0.6 * uniform01(key(cond_stream, 1));
  const double drift = uniform01(key(cond_stream, 2)) - 0.5;  // bins
  const double noise = kNoiseSigma * (0.8 + 0.4 * uniform01(key(cond_stream, 3)));

  const auto tones = tones_for(class_id, band);
  std::vector<double> phase(tones.size());
  for (std::size_t i = 0; i < tones.size(); ++i) {
    phase[i] = 2.0 * std::numbers::pi * uniform01(key(cond_stream, 100 + i));
  }

  std::vector<double> out(length);
  for (std::size_t n = 0; n < length; ++n) {
    double v = noise * gaussian(noise_stream, n);
    for (std::size_t i = 0; i < tones.size(); ++i) {
      const double cycles = (tones[i].bin + drift) / kGridSize;
      // Reduce the phase argument modulo one cycle to keep precision over long segments.
      const double turns = std::fmod(cycles * static_cast<double>(n), 1.0);
      v += gain * tones[i].amplitude * std::cos(2.0 * std::numbers::pi * turns + phase[i]);
    }
    out[n] = std::round(v);
  }
  return out;
}

}  // namespace

SegmentPair synth_segment(int class_id, std::uint64_t seed, std::size_t length) {
  const auto labels = label_from_case3(class_id);
  if (length == 0) throw Error(ErrorKind::kInvalidArgument, "synthetic segment length must be positive");
  SegmentPair pair;
  const auto id = fmt::format("synth_c{}_s{:016x}", class_id, seed);
  pair.lower = {id, Band::kLower, synth_band(class_id, seed, Band::kLower, length), labels};
  pair.upper = {id, Band::kUpper, synth_band(class_id, seed, Band::kUpper, length), labels};
  return pair;
}

std::uint64_t synth_segment_seed(std::uint64_t base_seed, int class_id, std::size_t index) {
  return key(key(base_seed, static_cast<std::uint64_t>(class_id)), index);
}

std::vector<SegmentPair> synth_corpus(std::size_t n_per_class, std::uint64_t base_seed, std::size_t length) {
  std::vector<SegmentPair> out(n_per_class * kCase3Classes);
  const auto total = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    const int c = static_cast<int>(static_cast<std::size_t>(k) / n_per_class);
    const std::size_t i = static_cast<std::size_t>(k) % n_per_class;
    out[static_cast<std::size_t>(k)] = synth_segment(c, synth_segment_seed(base_seed, c, i), length);
  }
  return out;
}

}  // namespace rfsentry
