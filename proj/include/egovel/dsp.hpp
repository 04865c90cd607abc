// Copyright 2026 The egovel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace egovel {

using cplx = std::complex<double>;

/// Radix-2 FFT with the e^{-j 2 pi k n / N} convention. The forward transform
/// is unnormalized; the inverse applies 1/N. Throws SizeError unless the
/// length is a power of two.
std::vector<cplx> fft_complex(std::span<const cplx> x, bool inverse = false);

/// In-place variant of fft_complex.
void fft_inplace(std::span<cplx> x, bool inverse = false);

/// O(n^2) direct DFT, same convention as fft_complex. Any length >= 1.
std::vector<cplx> naive_dft(std::span<const cplx> x);

/// Forward DFT of arbitrary length via Bluestein's chirp-z algorithm,
/// O(n log n). Falls through to fft_complex for powers of two.
std::vector<cplx> dft_any_length(std::span<const cplx> x);

/// Symmetric Hann window, w[k] = 0.5 (1 - cos(2 pi k / (n - 1))); n = 1 gives {1}.
std::vector<double> hann_window(std::size_t n);

std::vector<double> magnitudes(std::span<const cplx> spectrum);

struct Peak {
  std::size_t bin;
  double magnitude;

  bool operator==(const Peak&) const = default;
};

/// Peaks sorted by descending magnitude, ties by ascending bin.
struct PeakSet {
  std::vector<Peak> peaks;

  bool empty() const { return peaks.empty(); }
  std::size_t size() const { return peaks.size(); }
};

/// Up to n strict local maxima of magnitudes inside [min_bin, max_bin].
///
/// Neighbours outside the window are ignored, so the window edges compare
/// one-sided and the result does not depend on any value outside it. A bin
/// with zero magnitude is never a peak.
PeakSet top_n_peaks(std::span<const double> magnitudes, std::size_t n,
                    std::size_t min_bin, std::size_t max_bin);

/// 1-D phase unwrapping with threshold pi. output[0] = input[0] and every
/// successive difference is folded into (-pi, pi] by a multiple of 2 pi.
/// Throws ValueError on empty or non-finite input.
std::vector<double> unwrap_phase(std::span<const double> phases);

/// Wraps an angle into (-pi, pi].
double wrap_phase(double angle);

/// Ordinary least-squares slope of y[k] against k * dx. Requires >= 2 samples.
double least_squares_slope(std::span<const double> y, double dx);

}  // namespace egovel
