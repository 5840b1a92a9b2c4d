#pragma once

#include <span>
#include <vector>

namespace mmdec::signal::detail {

// y[n] = sum_k h[k] x[n - k] for n in [0, x.size()); direct summation for
// short problems, FFT otherwise.
std::vector<double> convolve_causal(std::span<const double> h, std::span<const double> x);

std::vector<double> convolve_causal_fft(std::span<const double> h, std::span<const double> x);

}  // namespace mmdec::signal::detail
