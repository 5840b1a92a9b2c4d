#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <vector>

namespace mmdec::test {

inline std::vector<double> sine(double f, double rate, std::size_t n, double amplitude = 1.0,
                                double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = amplitude * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / rate + phase);
  }
  return x;
}

inline double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Periodogram by direct DFT at bin k (k / n cycles per sample), mean removed.
inline std::vector<double> periodogram(const std::vector<double>& x) {
  const std::size_t n = x.size();
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  std::vector<double> p(n / 2 + 1);
  for (std::size_t k = 0; k < p.size(); ++k) {
    std::complex<double> acc = 0.0;
    const double w = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) acc += (x[i] - mean) * std::polar(1.0, w * static_cast<double>(i));
    p[k] = std::norm(acc);
  }
  return p;
}

inline double peak_frequency(const std::vector<double>& x, double rate) {
  const auto p = periodogram(x);
  std::size_t best = 1;
  for (std::size_t k = 1; k < p.size(); ++k)
    if (p[k] > p[best]) best = k;
  return static_cast<double>(best) * rate / static_cast<double>(x.size());
}

}  // namespace mmdec::test
