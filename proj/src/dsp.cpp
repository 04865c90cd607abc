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

#include "egovel/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include <fmt/format.h>

#include "egovel/config.hpp"
#include "egovel/errors.hpp"

namespace egovel {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// exp(-j 2 pi k / n) for k < n / 2, evaluated directly (no recurrence) so the
// transform error stays at O(eps log n). Cached per thread and size.
const std::vector<cplx>& twiddles(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::vector<cplx>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> table(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    table[k] = cplx(std::cos(angle), std::sin(angle));
  }
  return cache.emplace(n, std::move(table)).first->second;
}

struct BluesteinPlan {
  std::size_t conv_size;
  std::vector<cplx> chirp;           // exp(-j pi k^2 / n)
  std::vector<cplx> kernel_spectrum;  // FFT of the conjugate chirp kernel
};

}  // namespace

void fft_inplace(std::span<cplx> x, bool inverse) {
  const std::size_t n = x.size();
  if (!is_pow2(n)) {
    throw SizeError(fmt::format("FFT length {} is not a power of two", n));
  }
  if (n == 1) return;

  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }

  const std::vector<cplx>& table = twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const cplx w = inverse ? std::conj(table[k * stride]) : table[k * stride];
        const cplx t = w * x[i + k + half];
        x[i + k + half] = x[i + k] - t;
        x[i + k] += t;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : x) v *= scale;
  }
}

std::vector<cplx> fft_complex(std::span<const cplx> x, bool inverse) {
  std::vector<cplx> out(x.begin(), x.end());
  fft_inplace(out, inverse);
  return out;
}

std::vector<cplx> naive_dft(std::span<const cplx> x) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      // k*m reduced mod n keeps the angle argument small and exact.
      const std::uint64_t km = (static_cast<std::uint64_t>(k) * m) % n;
      const double angle = -2.0 * kPi * static_cast<double>(km) / static_cast<double>(n);
      acc += x[m] * cplx(std::cos(angle), std::sin(angle));
    }
    out[k] = acc;
  }
  return out;
}

namespace {

const BluesteinPlan& bluestein_plan(std::size_t n) {
  thread_local std::unordered_map<std::size_t, BluesteinPlan> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  BluesteinPlan plan;
  plan.chirp.resize(n);
  const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle exact for large k.
    const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % two_n;
    const double angle = -kPi * static_cast<double>(k2) / static_cast<double>(n);
    plan.chirp[k] = cplx(std::cos(angle), std::sin(angle));
  }
  plan.conv_size = 1;
  while (plan.conv_size < 2 * n - 1) plan.conv_size <<= 1;
  plan.kernel_spectrum.assign(plan.conv_size, 0.0);
  plan.kernel_spectrum[0] = std::conj(plan.chirp[0]);
  for (std::size_t k = 1; k < n; ++k) {
    plan.kernel_spectrum[k] = std::conj(plan.chirp[k]);
    plan.kernel_spectrum[plan.conv_size - k] = std::conj(plan.chirp[k]);
  }
  fft_inplace(plan.kernel_spectrum);
  return cache.emplace(n, std::move(plan)).first->second;
}

}  // namespace

std::vector<cplx> dft_any_length(std::span<const cplx> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  if (is_pow2(n)) return fft_complex(x);

  // X_k = w_k * sum_m (x_m w_m) conj(w_{k-m}), w_k = exp(-j pi k^2 / n).
  const BluesteinPlan& plan = bluestein_plan(n);
  std::vector<cplx> a(plan.conv_size, 0.0);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * plan.chirp[k];
  fft_inplace(a);
  for (std::size_t k = 0; k < plan.conv_size; ++k) a[k] *= plan.kernel_spectrum[k];
  fft_inplace(a, true);

  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * plan.chirp[k];
  return out;
}

std::vector<double> hann_window(std::size_t n) {
  if (n <= 1) return std::vector<double>(n, 1.0);
  std::vector<double> w(n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(k) / denom));
  }
  // Pin the symmetric pairs bitwise; cos() is not exactly symmetric near pi.
  for (std::size_t k = 0; k < n / 2; ++k) w[n - 1 - k] = w[k];
  return w;
}

std::vector<double> magnitudes(std::span<const cplx> spectrum) {
  std::vector<double> out(spectrum.size());
  std::transform(spectrum.begin(), spectrum.end(), out.begin(),
                 [](const cplx& v) { return std::abs(v); });
  return out;
}

PeakSet top_n_peaks(std::span<const double> mags, std::size_t n, std::size_t min_bin,
                    std::size_t max_bin) {
  PeakSet result;
  if (mags.empty() || n == 0 || min_bin > max_bin || min_bin >= mags.size()) return result;
  max_bin = std::min(max_bin, mags.size() - 1);

  for (std::size_t b = min_bin; b <= max_bin; ++b) {
    const double v = mags[b];
    if (!(v > 0.0)) continue;
    if (b > min_bin && !(v > mags[b - 1])) continue;
    if (b < max_bin && !(v > mags[b + 1])) continue;
    result.peaks.push_back({b, v});
  }
  std::stable_sort(result.peaks.begin(), result.peaks.end(),
                   [](const Peak& a, const Peak& b) { return a.magnitude > b.magnitude; });
  if (result.peaks.size() > n) result.peaks.resize(n);
  return result;
}

double wrap_phase(double angle) {
  double r = std::remainder(angle, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

std::vector<double> unwrap_phase(std::span<const double> phases) {
  if (phases.empty()) throw ValueError("unwrap_phase needs at least one sample");
  for (double p : phases) {
    if (!std::isfinite(p)) throw ValueError("unwrap_phase input contains a non-finite value");
  }

  std::vector<double> out(phases.size());
  out[0] = phases[0];
  // Track the accumulated correction as an integer count of turns so that
  // out[k] stays congruent to phases[k] without drift.
  double turns = 0.0;
  for (std::size_t k = 1; k < phases.size(); ++k) {
    const double prev = out[k - 1];
    double candidate = phases[k] + turns * 2.0 * kPi;
    double diff = candidate - prev;
    const double step = std::ceil((diff - kPi) / (2.0 * kPi));
    turns -= step;
    candidate = phases[k] + turns * 2.0 * kPi;
    diff = candidate - prev;
    // Guard against the ceil landing one turn off at the boundary.
    if (diff > kPi) {
      turns -= 1.0;
      candidate = phases[k] + turns * 2.0 * kPi;
    } else if (diff <= -kPi) {
      turns += 1.0;
      candidate = phases[k] + turns * 2.0 * kPi;
    }
    out[k] = candidate;
  }
  return out;
}

double least_squares_slope(std::span<const double> y, double dx) {
  const std::size_t n = y.size();
  if (n < 2) throw InsufficientDataError("least-squares slope needs at least two samples");
  const double x_mean = 0.5 * static_cast<double>(n - 1);
  double y_mean = 0.0;
  for (double v : y) y_mean += v;
  y_mean /= static_cast<double>(n);

  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dk = static_cast<double>(k) - x_mean;
    sxy += dk * (y[k] - y_mean);
    sxx += dk * dk;
  }
  return sxy / (sxx * dx);
}

}  // namespace egovel
