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

#include "rfsentry/signal_spectrum.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "rfsentry/error.hpp"

namespace rfsentry {

std::string_view to_string(Band band) { return band == Band::kLower ? "lower" : "upper"; }

std::string_view to_string(BandMode mode) {
  switch (mode) {
    case BandMode::kLowerOnly: return "lower";
    case BandMode::kUpperOnly: return "upper";
    case BandMode::kConcatenated: return "both";
  }
  return "?";
}

std::string_view to_string(Window window) { return window == Window::kHann ? "hann" : "rectangular"; }

BandMode parse_band_mode(std::string_view text) {
  if (text == "lower") return BandMode::kLowerOnly;
  if (text == "upper") return BandMode::kUpperOnly;
  if (text == "both") return BandMode::kConcatenated;
  throw Error(ErrorKind::kConfig, fmt::format("unknown band mode '{}' (expected lower, upper or both)", text));
}

Window parse_window(std::string_view text) {
  if (text == "rectangular" || text == "rect") return Window::kRectangular;
  if (text == "hann") return Window::kHann;
  throw Error(ErrorKind::kConfig, fmt::format("unknown window '{}' (expected rectangular or hann)", text));
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace {

void check_frame_length(std::size_t n) {
  if (!is_power_of_two(n) || n < 2 || n > kMaxFrameSize) {
    throw Error(ErrorKind::kInvalidFrame, fmt::format("frame length {} is not a power of two in [2, 2^20]", n));
  }
}

// Twiddles e^{-i2πk/N}, k < N/2, evaluated directly (no recurrence drift).
const std::vector<Complex>& twiddles(std::size_t n) {
  thread_local std::size_t cached_n = 0;
  thread_local std::vector<Complex> table;
  if (cached_n != n) {
    table.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      table[k] = Complex(std::cos(angle), std::sin(angle));
    }
    cached_n = n;
  }
  return table;
}

double window_value(Window window, std::size_t i, std::size_t n) {
  if (window == Window::kRectangular) return 1.0;
  return 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
}

}  // namespace

SampleFrame::SampleFrame(std::vector<double> samples) : samples_(std::move(samples)) {
  check_frame_length(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw Error(ErrorKind::kInvalidFrame, fmt::format("non-finite sample at index {}", i));
    }
  }
}

void fft_inplace(std::span<Complex> data) {
  const std::size_t n = data.size();
  check_frame_length(n);

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  const auto& w = twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const Complex t = w[k * stride] * data[start + k + half];
        const Complex u = data[start + k];
        data[start + k] = u + t;
        data[start + k + half] = u - t;
      }
    }
  }
}

std::vector<Complex> dft(const SampleFrame& frame) {
  std::vector<Complex> out(frame.samples().begin(), frame.samples().end());
  fft_inplace(out);
  return out;
}

MagnitudeSpectrum one_sided_magnitude(std::span<const Complex> spectrum, Band band) {
  check_frame_length(spectrum.size());
  MagnitudeSpectrum out;
  out.band = band;
  out.frame_size = spectrum.size();
  out.bins.resize(spectrum.size() / 2);
  for (std::size_t k = 0; k < out.bins.size(); ++k) out.bins[k] = std::abs(spectrum[k]);
  return out;
}

std::vector<SampleFrame> frame_segment(std::span<const double> samples, std::size_t frame_size,
                                       std::size_t hop) {
  check_frame_length(frame_size);
  if (hop == 0) throw Error(ErrorKind::kInvalidArgument, "hop must be >= 1");
  if (samples.size() < frame_size) {
    throw Error(ErrorKind::kInsufficientData,
                fmt::format("{} samples cannot fill one frame of {}", samples.size(), frame_size));
  }
  const std::size_t count = (samples.size() - frame_size) / hop + 1;
  std::vector<SampleFrame> frames;
  frames.reserve(count);
  for (std::size_t f = 0; f < count; ++f) {
    auto block = samples.subspan(f * hop, frame_size);
    frames.emplace_back(std::vector<double>(block.begin(), block.end()));
  }
  return frames;
}

MagnitudeSpectrum average_spectrum(std::span<const SampleFrame> frames, Band band, Window window) {
  if (frames.empty()) throw Error(ErrorKind::kInsufficientData, "cannot average an empty frame list");
  const std::size_t n = frames.front().size();
  std::vector<double> taper(n);
  for (std::size_t i = 0; i < n; ++i) taper[i] = window_value(window, i, n);

  MagnitudeSpectrum out;
  out.band = band;
  out.frame_size = n;
  out.bins.assign(n / 2, 0.0);

  std::vector<Complex> buf(n);
  for (const auto& frame : frames) {
    if (frame.size() != n) {
      throw Error(ErrorKind::kShape, fmt::format("mixed frame sizes {} and {}", n, frame.size()));
    }
    const auto x = frame.samples();
    for (std::size_t i = 0; i < n; ++i) buf[i] = Complex(x[i] * taper[i], 0.0);
    fft_inplace(buf);
    for (std::size_t k = 0; k < n / 2; ++k) out.bins[k] += std::abs(buf[k]);
  }
  const double count = static_cast<double>(frames.size());
  for (double& b : out.bins) b /= count;
  return out;
}

double compute_scaling_factor(const MagnitudeSpectrum& lb, const MagnitudeSpectrum& ub, std::size_t q) {
  if (lb.band != Band::kLower || ub.band != Band::kUpper) {
    throw Error(ErrorKind::kInvalidArgument, "scaling factor expects (lower, upper) spectra");
  }
  if (lb.bins.size() != ub.bins.size()) {
    throw Error(ErrorKind::kShape, fmt::format("band lengths differ: {} vs {}", lb.bins.size(), ub.bins.size()));
  }
  if (q == 0 || q > lb.bins.size()) {
    throw Error(ErrorKind::kInvalidArgument, fmt::format("seam width q={} outside [1, {}]", q, lb.bins.size()));
  }
  const std::size_t len = lb.bins.size();
  double tail = 0.0;
  double head = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    tail += lb.bins[len - q + i];
    head += ub.bins[i];
  }
  tail /= static_cast<double>(q);
  head /= static_cast<double>(q);
  if (!(head > std::numeric_limits<double>::epsilon())) {
    throw Error(ErrorKind::kDegenerateSpectrum, fmt::format("upper-band head mean {} is not positive", head));
  }
  return tail / head;
}

double scaling_factor_or_unity(const MagnitudeSpectrum& lb, const MagnitudeSpectrum& ub, std::size_t q) {
  try {
    return compute_scaling_factor(lb, ub, q);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kDegenerateSpectrum) throw;
    spdlog::warn("{}; using scaling factor 1", e.what());
    return 1.0;
  }
}

FeatureVector concatenate_bands(const MagnitudeSpectrum& lb, const MagnitudeSpectrum& ub, double s) {
  if (lb.bins.size() != ub.bins.size()) {
    throw Error(ErrorKind::kShape, fmt::format("band lengths differ: {} vs {}", lb.bins.size(), ub.bins.size()));
  }
  if (!std::isfinite(s) || s <= 0.0) {
    throw Error(ErrorKind::kInvalidArgument, fmt::format("scaling factor {} must be finite and positive", s));
  }
  FeatureVector out;
  out.band_mode = BandMode::kConcatenated;
  out.scaling_factor = s;
  out.values.reserve(lb.bins.size() * 2);
  out.values.insert(out.values.end(), lb.bins.begin(), lb.bins.end());
  for (double b : ub.bins) out.values.push_back(s * b);
  return out;
}

void FeatureConfig::validate() const {
  if (!is_power_of_two(frame_size) || frame_size < 2 || frame_size > kMaxFrameSize) {
    throw Error(ErrorKind::kConfig, fmt::format("frame size {} must be a power of two in [2, 2^20]", frame_size));
  }
  if (hop == 0) throw Error(ErrorKind::kConfig, "hop must be >= 1");
  if (q == 0 || q > frame_size / 2) {
    throw Error(ErrorKind::kConfig, fmt::format("seam width q={} outside [1, {}]", q, frame_size / 2));
  }
}

std::size_t FeatureConfig::feature_dim(BandMode mode) const {
  return mode == BandMode::kConcatenated ? frame_size : frame_size / 2;
}

MagnitudeSpectrum segment_spectrum(std::span<const double> samples, Band band, const FeatureConfig& config) {
  const auto frames = frame_segment(samples, config.frame_size, config.hop);
  return average_spectrum(frames, band, config.window);
}

FeatureVector extract_features(std::span<const double> lower, std::span<const double> upper, BandMode mode,
                               const FeatureConfig& config) {
  config.validate();
  switch (mode) {
    case BandMode::kLowerOnly: {
      FeatureVector out;
      out.band_mode = mode;
      out.values = segment_spectrum(lower, Band::kLower, config).bins;
      return out;
    }
    case BandMode::kUpperOnly: {
      FeatureVector out;
      out.band_mode = mode;
      out.values = segment_spectrum(upper, Band::kUpper, config).bins;
      return out;
    }
    case BandMode::kConcatenated: {
      const auto lb = segment_spectrum(lower, Band::kLower, config);
      const auto ub = segment_spectrum(upper, Band::kUpper, config);
      return concatenate_bands(lb, ub, scaling_factor_or_unity(lb, ub, config.q));
    }
  }
  throw Error(ErrorKind::kConfig, "unknown band mode");
}

}  // namespace rfsentry
