#include "mmdec/signal/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "mmdec/common/error.hpp"
#include "fft_convolve.hpp"

namespace mmdec::signal {
namespace {

constexpr double kKaiserBeta = 8.6;
constexpr long kZeroCrossingsPerSide = 32;

long to_integer_rate(double rate, long scale) {
  const double scaled = rate * static_cast<double>(scale);
  const double rounded = std::round(scaled);
  if (std::abs(scaled - rounded) > 1e-9 * std::max(1.0, scaled)) return 0;
  return static_cast<long>(rounded);
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

std::ptrdiff_t reflect_index(std::ptrdiff_t i, std::ptrdiff_t n) {
  if (n == 1) return 0;
  const std::ptrdiff_t period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

RateRatio rate_ratio(double from_rate, double to_rate) {
  if (!(from_rate > 0.0) || !(to_rate > 0.0)) {
    throw Error("resample: sample rates must be positive (got " + std::to_string(from_rate) +
                " -> " + std::to_string(to_rate) + ")");
  }
  for (long scale : {1L, 10L, 100L, 1000L}) {
    const long a = to_integer_rate(from_rate, scale);
    const long b = to_integer_rate(to_rate, scale);
    if (a > 0 && b > 0) {
      const long g = std::gcd(a, b);
      return {b / g, a / g};
    }
  }
  throw Error("resample: rate ratio is not rational at millihertz resolution");
}

std::size_t resampled_length(std::size_t n, double from_rate, double to_rate) {
  const auto [up, down] = rate_ratio(from_rate, to_rate);
  const auto num = static_cast<unsigned long long>(n) * static_cast<unsigned long long>(up);
  return static_cast<std::size_t>((num + down - 1) / down);
}

std::vector<double> resample(std::span<const double> x, double from_rate, double to_rate) {
  const auto [up, down] = rate_ratio(from_rate, to_rate);
  if (up == down) return {x.begin(), x.end()};
  if (x.empty()) return {};

  const long spacing = std::max(up, down);
  const long half = kZeroCrossingsPerSide * spacing;
  const long length = 2 * half + 1;

  std::vector<double> h(length);
  const double i0_beta = std::cyl_bessel_i(0.0, kKaiserBeta);
  for (long j = 0; j < length; ++j) {
    const double r = static_cast<double>(j - half) / static_cast<double>(half);
    const double window = std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    h[j] = window * sinc(static_cast<double>(j - half) / static_cast<double>(spacing));
  }
  // Each polyphase branch should have unit DC gain.
  for (long phase = 0; phase < up; ++phase) {
    double total = 0.0;
    for (long j = phase; j < length; j += up) total += h[j];
    for (long j = phase; j < length; j += up) h[j] /= total;
  }

  const auto n_in = static_cast<std::ptrdiff_t>(x.size());
  const std::size_t n_out = resampled_length(x.size(), from_rate, to_rate);
  std::vector<double> y(n_out);
  for (std::size_t m = 0; m < n_out; ++m) {
    const long pos = static_cast<long>(m) * down + half;
    double acc = 0.0;
    for (long j = pos % up; j < length; j += up) {
      const std::ptrdiff_t n = (pos - j) / up;
      acc += h[j] * x[reflect_index(n, n_in)];
    }
    y[m] = acc;
  }
  return y;
}

std::vector<double> design_fir_bandpass(Band band, double rate, std::size_t taps) {
  if (taps % 2 == 0 || taps == 0) {
    throw Error("FIR design: taps must be odd for a type-I filter (got " + std::to_string(taps) + ")");
  }
  const double nyquist = rate / 2.0;
  if (!(band.lo_hz >= 0.0) || !(band.hi_hz > band.lo_hz) || !(band.hi_hz < nyquist)) {
    throw Error("FIR design: band [" + std::to_string(band.lo_hz) + ", " + std::to_string(band.hi_hz) +
                "] Hz must satisfy 0 <= lo < hi < " + std::to_string(nyquist) + " Hz");
  }
  const double f_lo = band.lo_hz / rate;
  const double f_hi = band.hi_hz / rate;
  const auto mid = static_cast<double>(taps - 1) / 2.0;
  std::vector<double> h(taps);
  for (std::size_t n = 0; n < taps; ++n) {
    const double t = static_cast<double>(n) - mid;
    const double hamming =
        0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(taps - 1));
    h[n] = hamming * (2.0 * f_hi * sinc(2.0 * f_hi * t) - 2.0 * f_lo * sinc(2.0 * f_lo * t));
  }
  // Unit gain at the band centre (DC for a lowpass).
  const double f_ref = band.lo_hz == 0.0 ? 0.0 : (f_lo + f_hi) / 2.0;
  double re = 0.0;
  double im = 0.0;
  for (std::size_t n = 0; n < taps; ++n) {
    const double phase = 2.0 * std::numbers::pi * f_ref * (static_cast<double>(n) - mid);
    re += h[n] * std::cos(phase);
    im += h[n] * std::sin(phase);
  }
  const double gain = std::hypot(re, im);
  for (double& v : h) v /= gain;
  return h;
}

std::vector<double> fir_filter(std::span<const double> h, std::span<const double> x) {
  return detail::convolve_causal(h, x);
}

std::vector<double> fir_zero_phase(std::span<const double> x, std::span<const double> h) {
  if (x.empty()) return {};
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const auto pad = static_cast<std::ptrdiff_t>(h.size());
  std::vector<double> padded(static_cast<std::size_t>(n + 2 * pad));
  for (std::ptrdiff_t i = 0; i < n + 2 * pad; ++i) padded[i] = x[reflect_index(i - pad, n)];

  std::vector<double> y = detail::convolve_causal(h, padded);
  std::reverse(y.begin(), y.end());
  y = detail::convolve_causal(h, y);
  std::reverse(y.begin(), y.end());
  return {y.begin() + pad, y.begin() + pad + n};
}

std::vector<double> fir_zero_phase(std::span<const double> x, double rate, Band band,
                                   std::size_t taps) {
  const auto h = design_fir_bandpass(band, rate, taps);
  return fir_zero_phase(x, h);
}

FirstOrderSection butterworth1_highpass(double cutoff_hz, double rate) {
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < rate / 2.0)) {
    throw Error("highpass: cutoff must lie in (0, Nyquist)");
  }
  // Bilinear transform with prewarping, so |H| is exactly -3 dB at the cutoff.
  const double k = std::tan(std::numbers::pi * cutoff_hz / rate);
  const double b0 = 1.0 / (1.0 + k);
  return {b0, -b0, (k - 1.0) / (k + 1.0)};
}

namespace {

// Transposed direct form II with initial state z0.
void run_section(const FirstOrderSection& s, std::vector<double>& v, double z0) {
  double z = z0;
  for (double& sample : v) {
    const double in = sample;
    const double out = s.b0 * in + z;
    z = s.b1 * in - s.a1 * out;
    sample = out;
  }
}

// State that makes the response to a constant input start in steady state.
double steady_state_zi(const FirstOrderSection& s) {
  // For a constant unit input, y = (b0 + b1) / (1 + a1) and z = b1 - a1 * y.
  const double y = (s.b0 + s.b1) / (1.0 + s.a1);
  return s.b1 - s.a1 * y;
}

}  // namespace

std::vector<double> filtfilt(const FirstOrderSection& section, std::span<const double> x) {
  if (x.empty()) return {};
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const std::ptrdiff_t pad = std::min<std::ptrdiff_t>(6, n - 1);

  std::vector<double> ext(static_cast<std::size_t>(n + 2 * pad));
  for (std::ptrdiff_t i = 0; i < pad; ++i) ext[i] = 2.0 * x[0] - x[pad - i];
  for (std::ptrdiff_t i = 0; i < n; ++i) ext[pad + i] = x[i];
  for (std::ptrdiff_t i = 0; i < pad; ++i) ext[pad + n + i] = 2.0 * x[n - 1] - x[n - 2 - i];

  const double zi = steady_state_zi(section);
  run_section(section, ext, zi * ext.front());
  std::reverse(ext.begin(), ext.end());
  run_section(section, ext, zi * ext.front());
  std::reverse(ext.begin(), ext.end());
  return {ext.begin() + pad, ext.begin() + pad + n};
}

std::vector<double> highpass_zero_phase(std::span<const double> x, double rate,
                                        double cutoff_hz) {
  return filtfilt(butterworth1_highpass(cutoff_hz, rate), x);
}

}  // namespace mmdec::signal
