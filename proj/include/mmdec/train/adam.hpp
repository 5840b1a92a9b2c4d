#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "mmdec/autodiff/tensor.hpp"
#include "mmdec/common/error.hpp"

namespace mmdec::train {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moment accumulators mirroring the parameter arrays.
struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::size_t step = 0;
  std::size_t skipped = 0;  // updates refused because of non-finite gradients
};

template <typename T>
AdamState adam_init(const std::vector<autodiff::Tensor<T>>& params) {
  AdamState s;
  for (const auto& p : params) {
    s.m.emplace_back(p.size(), 0.0);
    s.v.emplace_back(p.size(), 0.0);
  }
  return s;
}

// One bias-corrected Adam update. Returns false, leaving params and state
// untouched apart from the skip counter, if any gradient is non-finite.
template <typename T>
bool adam_step(std::vector<autodiff::Tensor<T>>& params, const std::vector<std::vector<double>>& grads,
               AdamState& state, double lr, const AdamConfig& config = {}) {
  if (grads.size() != params.size() || state.m.size() != params.size()) {
    throw Error("adam_step: parameter, gradient and state counts differ");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].size() != params[i].size() || state.m[i].size() != params[i].size()) {
      throw Error("adam_step: array " + std::to_string(i) + " has mismatched sizes");
    }
    for (const double g : grads[i]) {
      if (!std::isfinite(g)) {
        ++state.skipped;
        return false;
      }
    }
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i].values();
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double g = grads[i][j];
      m[j] = config.beta1 * m[j] + (1.0 - config.beta1) * g;
      v[j] = config.beta2 * v[j] + (1.0 - config.beta2) * g * g;
      const double update = lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + config.epsilon);
      p[j] = static_cast<T>(static_cast<double>(p[j]) - update);
    }
  }
  return true;
}

// initial_lr / factor^floor(epoch / every), epochs counted from 0.
inline double lr_schedule(std::size_t epoch, double initial_lr, std::size_t every, double factor) {
  if (every == 0) throw Error("lr_schedule: decay interval must be positive");
  return initial_lr / std::pow(factor, static_cast<double>(epoch / every));
}

// Tracks the best validation loss. A loss counts as an improvement only when
// strictly below the best so far; training stops once `patience` epochs in a
// row brought no improvement.
class EarlyStopper {
 public:
  explicit EarlyStopper(std::size_t patience) : patience_(patience) {
    if (patience == 0) throw Error("EarlyStopper: patience must be positive");
  }

  // Records the loss of the next epoch; returns true if it is a new best.
  bool update(double val_loss) {
    ++epochs_;
    if (val_loss < best_loss_) {
      best_loss_ = val_loss;
      best_epoch_ = epochs_;
      since_ = 0;
      return true;
    }
    ++since_;
    return false;
  }

  bool should_stop() const { return since_ >= patience_; }
  double best_loss() const { return best_loss_; }
  // 1-based epoch of the best loss, 0 before the first update.
  std::size_t best_epoch() const { return best_epoch_; }
  std::size_t epochs_since_improvement() const { return since_; }
  std::size_t epochs() const { return epochs_; }

 private:
  std::size_t patience_;
  double best_loss_ = std::numeric_limits<double>::infinity();
  std::size_t best_epoch_ = 0;
  std::size_t since_ = 0;
  std::size_t epochs_ = 0;
};

}  // namespace mmdec::train
