#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mmdec::signal {

// Glasberg & Moore ERB-rate scale (ERB number) and its inverse.
double erb_rate(double hz);
double erb_rate_to_hz(double erb);
// Equivalent rectangular bandwidth at a centre frequency.
double erb_bandwidth(double hz);

// One channel of an all-pole gammatone filter: `order` identical two-pole
// resonators in cascade, normalised to unit gain at the centre frequency.
struct GammatoneFilter {
  double center_hz;
  double radius;  // pole radius
  double theta;   // pole angle, rad/sample
  double stage_gain;
};

struct GammatoneBank {
  std::vector<double> center_freqs;
  int order = 4;
  std::vector<GammatoneFilter> filters;
  double rate = 0.0;
};

// Centres equally spaced on the ERB-rate scale from f_lo to f_hi inclusive.
GammatoneBank design_gammatone_bank(std::size_t n_filters, double f_lo, double f_hi, double rate);

std::vector<double> apply_gammatone(const GammatoneFilter& filter, int order,
                                    std::span<const double> x);

}  // namespace mmdec::signal
