#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mmdec::signal {

struct Band {
  double lo_hz;
  double hi_hz;
};

// Reduced integer ratio up/down between two sample rates.
struct RateRatio {
  long up;
  long down;
};

RateRatio rate_ratio(double from_rate, double to_rate);

// Number of samples produced by resample() for an input of n samples.
std::size_t resampled_length(std::size_t n, double from_rate, double to_rate);

// Polyphase rational resampler. The anti-alias/anti-image lowpass is a
// Kaiser-windowed sinc (beta 8.6) spanning 32 zero crossings on each side of
// its centre, i.e. 64 taps per output phase. Signal ends are reflected.
std::vector<double> resample(std::span<const double> x, double from_rate, double to_rate);

// Hamming-windowed sinc bandpass, normalised to unit gain at the band centre.
// band.lo_hz == 0 yields a lowpass. taps must be odd.
std::vector<double> design_fir_bandpass(Band band, double rate, std::size_t taps);

// Causal FIR: y[n] = sum_k h[k] x[n - k], same length as x.
std::vector<double> fir_filter(std::span<const double> h, std::span<const double> x);

// Forward-backward application of a symmetric FIR. The input is reflect-padded
// by one filter length on each side and cropped back afterwards.
std::vector<double> fir_zero_phase(std::span<const double> x, std::span<const double> h);
std::vector<double> fir_zero_phase(std::span<const double> x, double rate, Band band,
                                   std::size_t taps);

// y[n] = b0 x[n] + b1 x[n-1] - a1 y[n-1]
struct FirstOrderSection {
  double b0;
  double b1;
  double a1;
};

FirstOrderSection butterworth1_highpass(double cutoff_hz, double rate);

// Zero-phase application (forward, then backward) with odd-extension padding
// and steady-state initial conditions.
std::vector<double> filtfilt(const FirstOrderSection& section, std::span<const double> x);

std::vector<double> highpass_zero_phase(std::span<const double> x, double rate,
                                        double cutoff_hz);

// Index into [0, n) after whole-sample symmetric reflection at both ends.
std::ptrdiff_t reflect_index(std::ptrdiff_t i, std::ptrdiff_t n);

}  // namespace mmdec::signal
