#include "fft_convolve.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <memory>
#include <mutex>

namespace mmdec::signal::detail {
namespace {

// The FFTW planner is not re-entrant.
std::mutex g_planner_mutex;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(g_planner_mutex);
    fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// Smallest size >= n whose only prime factors are 2, 3, 5 and 7.
std::size_t good_fft_size(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

}  // namespace

std::vector<double> convolve_causal_fft(std::span<const double> h, std::span<const double> x) {
  if (x.empty() || h.empty()) return std::vector<double>(x.size(), 0.0);
  const std::size_t n = good_fft_size(x.size() + h.size() - 1);
  const std::size_t bins = n / 2 + 1;

  auto xt = fftw_buffer<double>(n);
  auto ht = fftw_buffer<double>(n);
  auto xf = fftw_buffer<fftw_complex>(bins);
  auto hf = fftw_buffer<fftw_complex>(bins);

  Plan fwd_x, fwd_h, inv;
  {
    std::lock_guard lock(g_planner_mutex);
    fwd_x.reset(fftw_plan_dft_r2c_1d(static_cast<int>(n), xt.get(), xf.get(), FFTW_ESTIMATE));
    fwd_h.reset(fftw_plan_dft_r2c_1d(static_cast<int>(n), ht.get(), hf.get(), FFTW_ESTIMATE));
    inv.reset(fftw_plan_dft_c2r_1d(static_cast<int>(n), xf.get(), xt.get(), FFTW_ESTIMATE));
  }

  std::fill(xt.get(), xt.get() + n, 0.0);
  std::fill(ht.get(), ht.get() + n, 0.0);
  std::copy(x.begin(), x.end(), xt.get());
  std::copy(h.begin(), h.end(), ht.get());
  fftw_execute(fwd_x.get());
  fftw_execute(fwd_h.get());

  for (std::size_t k = 0; k < bins; ++k) {
    const std::complex<double> a(xf[k][0], xf[k][1]);
    const std::complex<double> b(hf[k][0], hf[k][1]);
    const auto c = a * b;
    xf[k][0] = c.real();
    xf[k][1] = c.imag();
  }
  fftw_execute(inv.get());

  std::vector<double> y(x.size());
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = xt[i] * scale;
  return y;
}

std::vector<double> convolve_causal(std::span<const double> h, std::span<const double> x) {
  if (h.size() * x.size() > (1u << 20) && h.size() > 32) return convolve_causal_fft(h, x);
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t kmax = std::min(h.size(), i + 1);
    double acc = 0.0;
    for (std::size_t k = 0; k < kmax; ++k) acc += h[k] * x[i - k];
    y[i] = acc;
  }
  return y;
}

}  // namespace mmdec::signal::detail
