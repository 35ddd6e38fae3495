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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace rfsentry {

enum class Band : std::uint8_t { kLower = 0, kUpper = 1 };

enum class BandMode : std::uint8_t { kLowerOnly = 0, kUpperOnly = 1, kConcatenated = 2 };

enum class Window : std::uint8_t { kRectangular = 0, kHann = 1 };

std::string_view to_string(Band band);
std::string_view to_string(BandMode mode);  // "lower" | "upper" | "both"
std::string_view to_string(Window window);
BandMode parse_band_mode(std::string_view text);
Window parse_window(std::string_view text);

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxFrameSize = std::size_t{1} << 20;
inline constexpr std::size_t kDefaultFrameSize = 2048;
inline constexpr std::size_t kDefaultSeamBins = 8;

bool is_power_of_two(std::size_t n);

// A validated block of N real samples: N is a power of two in [2, 2^20] and
// every value is finite.
class SampleFrame {
 public:
  explicit SampleFrame(std::vector<double> samples);

  std::span<const double> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }

 private:
  std::vector<double> samples_;
};

struct MagnitudeSpectrum {
  std::vector<double> bins;  // |X[k]| for k = 0..N/2-1, Nyquist dropped
  Band band = Band::kLower;
  std::size_t frame_size = 0;
};

struct FeatureVector {
  std::vector<double> values;
  BandMode band_mode = BandMode::kLowerOnly;
  std::optional<double> scaling_factor;  // set iff band_mode == kConcatenated
};

// In-place iterative radix-2 FFT, forward sign convention e^{-i2πnk/N}.
void fft_inplace(std::span<Complex> data);

// Full N-point complex spectrum of a real frame.
std::vector<Complex> dft(const SampleFrame& frame);

MagnitudeSpectrum one_sided_magnitude(std::span<const Complex> spectrum, Band band);

// Splits a sample stream into frames of `frame_size` starting every `hop`
// samples. The trailing remainder shorter than a frame is dropped.
std::vector<SampleFrame> frame_segment(std::span<const double> samples, std::size_t frame_size,
                                       std::size_t hop);

// Element-wise mean of the per-frame one-sided magnitude spectra.
MagnitudeSpectrum average_spectrum(std::span<const SampleFrame> frames, Band band,
                                   Window window = Window::kRectangular);

// Ratio of the mean of the last q lower-band bins to the mean of the first q
// upper-band bins. Throws kDegenerateSpectrum when the upper head mean is not
// strictly above machine epsilon.
double compute_scaling_factor(const MagnitudeSpectrum& lb, const MagnitudeSpectrum& ub, std::size_t q);

// compute_scaling_factor, falling back to 1 with a logged warning on a
// degenerate upper band.
double scaling_factor_or_unity(const MagnitudeSpectrum& lb, const MagnitudeSpectrum& ub, std::size_t q);

FeatureVector concatenate_bands(const MagnitudeSpectrum& lb, const MagnitudeSpectrum& ub, double s);

struct FeatureConfig {
  std::size_t frame_size = kDefaultFrameSize;
  std::size_t hop = kDefaultFrameSize;
  std::size_t q = kDefaultSeamBins;
  Window window = Window::kRectangular;

  void validate() const;
  std::size_t band_dim() const { return frame_size / 2; }
  std::size_t feature_dim(BandMode mode) const;
};

// One segment's averaged band spectrum: frame_segment + average_spectrum.
MagnitudeSpectrum segment_spectrum(std::span<const double> samples, Band band, const FeatureConfig& config);

// Builds the feature vector for one segment. Only the bands the mode needs are
// read; the unused span may be empty.
FeatureVector extract_features(std::span<const double> lower, std::span<const double> upper, BandMode mode,
                               const FeatureConfig& config);

}  // namespace rfsentry
