#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mmdec/autodiff/tensor.hpp"

namespace mmdec::autodiff {

struct LossAndGrad {
  double loss = 0.0;
  // One gradient buffer per parameter tensor, same layout.
  std::vector<std::vector<double>> grads;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

inline double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / scale;
}

// Compares reverse-mode gradients with central finite differences for every
// element of every parameter tensor. `fn(params, need_grads)` returns the loss
// at `params`, plus the reverse-mode gradients when need_grads is true.
template <typename Fn>
GradCheckResult grad_check(Fn&& fn, std::vector<Tensor<double>> params, double eps = 1e-5) {
  const LossAndGrad base = fn(params, true);
  GradCheckResult result;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < params[p].size(); ++i) {
      const double saved = params[p][i];
      params[p][i] = saved + eps;
      const double up = fn(params, false).loss;
      params[p][i] = saved - eps;
      const double down = fn(params, false).loss;
      params[p][i] = saved;

      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = base.grads.at(p).at(i);
      const double err = relative_error(analytic, numeric);
      ++result.checked;
      if (err > result.max_relative_error || result.checked == 1) {
        result.max_relative_error = err;
        result.worst_param = p;
        result.worst_index = i;
        result.worst_analytic = analytic;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace mmdec::autodiff
