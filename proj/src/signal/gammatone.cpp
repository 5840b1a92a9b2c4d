#include "mmdec/signal/gammatone.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "mmdec/common/error.hpp"

namespace mmdec::signal {
namespace {

// Bandwidth scale that makes a 4th-order gammatone match the ERB.
constexpr double kBandwidthFactor = 1.019;

}  // namespace

double erb_rate(double hz) { return 21.4 * std::log10(1.0 + 0.00437 * hz); }

double erb_rate_to_hz(double erb) { return (std::pow(10.0, erb / 21.4) - 1.0) / 0.00437; }

double erb_bandwidth(double hz) { return 24.7 * (4.37 * hz / 1000.0 + 1.0); }

GammatoneBank design_gammatone_bank(std::size_t n_filters, double f_lo, double f_hi, double rate) {
  if (n_filters < 2) {
    throw Error("gammatone bank needs at least 2 filters (got " + std::to_string(n_filters) + ")");
  }
  if (!(rate > 0.0) || !(f_lo > 0.0) || !(f_lo < f_hi) || !(f_hi < rate / 2.0)) {
    throw Error("gammatone bank bounds must satisfy 0 < f_lo < f_hi < rate/2 (got f_lo=" +
                std::to_string(f_lo) + ", f_hi=" + std::to_string(f_hi) + ", rate=" +
                std::to_string(rate) + ")");
  }

  GammatoneBank bank;
  bank.rate = rate;
  const double e_lo = erb_rate(f_lo);
  const double e_hi = erb_rate(f_hi);
  for (std::size_t i = 0; i < n_filters; ++i) {
    double fc = erb_rate_to_hz(e_lo + (e_hi - e_lo) * static_cast<double>(i) /
                                          static_cast<double>(n_filters - 1));
    if (i == 0) fc = f_lo;
    if (i == n_filters - 1) fc = f_hi;
    bank.center_freqs.push_back(fc);

    GammatoneFilter f{};
    f.center_hz = fc;
    f.radius = std::exp(-2.0 * std::numbers::pi * kBandwidthFactor * erb_bandwidth(fc) / rate);
    f.theta = 2.0 * std::numbers::pi * fc / rate;
    const std::complex<double> z1 = std::polar(1.0, -f.theta);
    const std::complex<double> denom =
        1.0 - 2.0 * f.radius * std::cos(f.theta) * z1 + f.radius * f.radius * z1 * z1;
    f.stage_gain = std::abs(denom);
    bank.filters.push_back(f);
  }
  return bank;
}

std::vector<double> apply_gammatone(const GammatoneFilter& filter, int order,
                                    std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  const double a1 = 2.0 * filter.radius * std::cos(filter.theta);
  const double a2 = -filter.radius * filter.radius;
  for (int stage = 0; stage < order; ++stage) {
    double y1 = 0.0;
    double y2 = 0.0;
    for (double& v : y) {
      const double out = filter.stage_gain * v + a1 * y1 + a2 * y2;
      y2 = y1;
      y1 = out;
      v = out;
    }
  }
  return y;
}

}  // namespace mmdec::signal
