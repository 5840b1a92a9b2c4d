#pragma once

#include <Eigen/Core>
#include <cmath>
#include <memory>
#include <string>

#include "mmdec/autodiff/tape.hpp"

namespace mmdec::autodiff {

struct ConvLayerSpec {
  std::size_t in_channels = 1;
  std::size_t out_channels = 16;
  std::size_t kernel_size = 3;
  std::size_t dilation = 1;
  bool separable = false;

  // Samples removed from the time axis by this layer (no padding).
  std::size_t shrink() const { return (kernel_size - 1) * dilation; }
  std::size_t weight_count() const {
    return separable ? out_channels * (in_channels + kernel_size) : out_channels * in_channels * kernel_size;
  }
};

inline constexpr double kCosineNormFloor = 1e-12;
inline constexpr double kProbabilityClamp = 1e-7;

namespace detail {

template <typename T>
using ConstMap = Eigen::Map<const RowMatrix<T>>;
template <typename T>
using Map = Eigen::Map<RowMatrix<T>>;

template <typename T>
ConstMap<T> as_matrix(const std::vector<T>& v, std::size_t rows, std::size_t cols) {
  return {v.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}
template <typename T>
Map<T> as_matrix(std::vector<T>& v, std::size_t rows, std::size_t cols) {
  return {v.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

inline void require(bool ok, const std::string& message) {
  if (!ok) throw Error(message);
}

inline std::size_t output_length(std::size_t t, const ConvLayerSpec& spec, const char* op) {
  const std::size_t needed = spec.shrink() + 1;
  if (t < needed) {
    throw Error(std::string(op) + ": input has " + std::to_string(t) + " samples but kernel " +
                std::to_string(spec.kernel_size) + " with dilation " + std::to_string(spec.dilation) +
                " needs at least " + std::to_string(needed));
  }
  return t - spec.shrink();
}

// w[o, c, k] as an O x C matrix for one tap k.
template <typename T>
RowMatrix<T> tap_matrix(const std::vector<T>& w, std::size_t out, std::size_t in, std::size_t kernel,
                        std::size_t k) {
  RowMatrix<T> m(out, in);
  for (std::size_t o = 0; o < out; ++o)
    for (std::size_t c = 0; c < in; ++c) m(o, c) = w[(o * in + c) * kernel + k];
  return m;
}

}  // namespace detail

// out[o, t] = bias[o] + sum_c sum_k w[o, c, k] * x[c, t + k * dilation]
// x: C x T, w: O x C x K, bias: O. Output: O x (T - (K - 1) * dilation).
template <typename T>
Var<T> conv1d_dilated(const Var<T>& x, const Var<T>& w, const Var<T>& bias, std::size_t dilation) {
  auto& tape = *x.tape;
  const auto& xs = x.shape();
  const auto& ws = w.shape();
  detail::require(xs.size() == 2 && ws.size() == 3 && bias.shape().size() == 1,
                  "conv1d_dilated: expected x[CxT], w[OxCxK], bias[O]");
  const ConvLayerSpec spec{ws[1], ws[0], ws[2], dilation, false};
  detail::require(xs[0] == spec.in_channels && bias.shape()[0] == spec.out_channels && dilation >= 1 &&
                      spec.kernel_size >= 1,
                  "conv1d_dilated: shape mismatch x" + shape_string(xs) + " w" + shape_string(ws));
  const std::size_t t_in = xs[1];
  const std::size_t t_out = detail::output_length(t_in, spec, "conv1d_dilated");
  const auto C = spec.in_channels, O = spec.out_channels, K = spec.kernel_size;

  Tensor<T> out({O, t_out});
  auto y = detail::as_matrix(out.values(), O, t_out);
  const auto xm = detail::as_matrix(x.value().values(), C, t_in);
  const auto& wv = w.value().values();
  const auto& bv = bias.value().values();
  for (std::size_t k = 0; k < K; ++k) {
    const auto wk = detail::tap_matrix(wv, O, C, K, k);
    y.noalias() += wk * xm.middleCols(static_cast<Eigen::Index>(k * dilation), static_cast<Eigen::Index>(t_out));
  }
  for (std::size_t o = 0; o < O; ++o) y.row(static_cast<Eigen::Index>(o)).array() += bv[o];

  const bool needs = x.requires_grad() || w.requires_grad() || bias.requires_grad();
  const std::size_t xid = x.id, wid = w.id, bid = bias.id;
  return tape.push(std::move(out), needs, [=](Tape<T>& tp, std::size_t self) {
    const auto dy = detail::as_matrix(tp.grad(self), O, t_out);
    const auto xm = detail::as_matrix(tp.value(xid).values(), C, t_in);
    const auto& wv = tp.value(wid).values();
    if (tp.requires_grad(bid)) {
      auto& db = tp.grad(bid);
      for (std::size_t o = 0; o < O; ++o) db[o] += dy.row(static_cast<Eigen::Index>(o)).sum();
    }
    if (tp.requires_grad(wid)) {
      auto& dw = tp.grad(wid);
      for (std::size_t k = 0; k < K; ++k) {
        const RowMatrix<T> dwk =
            dy * xm.middleCols(static_cast<Eigen::Index>(k * dilation), static_cast<Eigen::Index>(t_out)).transpose();
        for (std::size_t o = 0; o < O; ++o)
          for (std::size_t c = 0; c < C; ++c) dw[(o * C + c) * K + k] += dwk(o, c);
      }
    }
    if (tp.requires_grad(xid)) {
      auto dx = detail::as_matrix(tp.grad(xid), C, t_in);
      for (std::size_t k = 0; k < K; ++k) {
        const auto wk = detail::tap_matrix(wv, O, C, K, k);
        dx.middleCols(static_cast<Eigen::Index>(k * dilation), static_cast<Eigen::Index>(t_out)).noalias() +=
            wk.transpose() * dy;
      }
    }
  });
}

// Rank-1 factorised convolution: w[o, c, k] = spatial[o, c] * temporal[o, k].
// Computed as a spatial projection followed by a per-filter temporal kernel.
template <typename T>
Var<T> separable_conv1d(const Var<T>& x, const Var<T>& spatial, const Var<T>& temporal, const Var<T>& bias,
                        std::size_t dilation) {
  auto& tape = *x.tape;
  const auto& xs = x.shape();
  detail::require(xs.size() == 2 && spatial.shape().size() == 2 && temporal.shape().size() == 2 &&
                      bias.shape().size() == 1,
                  "separable_conv1d: expected x[CxT], spatial[OxC], temporal[OxK], bias[O]");
  const ConvLayerSpec spec{xs[0], spatial.shape()[0], temporal.shape()[1], dilation, true};
  detail::require(spatial.shape()[1] == spec.in_channels && temporal.shape()[0] == spec.out_channels &&
                      bias.shape()[0] == spec.out_channels && dilation >= 1 && spec.kernel_size >= 1,
                  "separable_conv1d: shape mismatch x" + shape_string(xs) + " spatial" +
                      shape_string(spatial.shape()) + " temporal" + shape_string(temporal.shape()));
  const std::size_t t_in = xs[1];
  const std::size_t t_out = detail::output_length(t_in, spec, "separable_conv1d");
  const auto C = spec.in_channels, O = spec.out_channels, K = spec.kernel_size;

  const auto xm = detail::as_matrix(x.value().values(), C, t_in);
  const auto sm = detail::as_matrix(spatial.value().values(), O, C);
  auto projected = std::make_shared<RowMatrix<T>>(sm * xm);

  Tensor<T> out({O, t_out});
  auto y = detail::as_matrix(out.values(), O, t_out);
  const auto& tv = temporal.value().values();
  const auto& bv = bias.value().values();
  for (std::size_t o = 0; o < O; ++o) {
    const auto row = static_cast<Eigen::Index>(o);
    y.row(row).array() = bv[o];
    for (std::size_t k = 0; k < K; ++k) {
      y.row(row) += tv[o * K + k] *
                    projected->row(row).segment(static_cast<Eigen::Index>(k * dilation), static_cast<Eigen::Index>(t_out));
    }
  }

  const bool needs = x.requires_grad() || spatial.requires_grad() || temporal.requires_grad() || bias.requires_grad();
  const std::size_t xid = x.id, sid = spatial.id, tid = temporal.id, bid = bias.id;
  return tape.push(std::move(out), needs, [=](Tape<T>& tp, std::size_t self) {
    const auto dy = detail::as_matrix(tp.grad(self), O, t_out);
    const auto& tv = tp.value(tid).values();
    if (tp.requires_grad(bid)) {
      auto& db = tp.grad(bid);
      for (std::size_t o = 0; o < O; ++o) db[o] += dy.row(static_cast<Eigen::Index>(o)).sum();
    }
    if (tp.requires_grad(tid)) {
      auto& dt = tp.grad(tid);
      for (std::size_t o = 0; o < O; ++o)
        for (std::size_t k = 0; k < K; ++k)
          dt[o * K + k] += dy.row(static_cast<Eigen::Index>(o))
                               .dot(projected->row(static_cast<Eigen::Index>(o))
                                        .segment(static_cast<Eigen::Index>(k * dilation), static_cast<Eigen::Index>(t_out)));
    }
    if (!tp.requires_grad(sid) && !tp.requires_grad(xid)) return;
    RowMatrix<T> dz = RowMatrix<T>::Zero(O, t_in);
    for (std::size_t o = 0; o < O; ++o)
      for (std::size_t k = 0; k < K; ++k)
        dz.row(static_cast<Eigen::Index>(o)).segment(static_cast<Eigen::Index>(k * dilation), static_cast<Eigen::Index>(t_out)) +=
            tv[o * K + k] * dy.row(static_cast<Eigen::Index>(o));
    const auto xm = detail::as_matrix(tp.value(xid).values(), C, t_in);
    if (tp.requires_grad(sid)) {
      auto ds = detail::as_matrix(tp.grad(sid), O, C);
      ds.noalias() += dz * xm.transpose();
    }
    if (tp.requires_grad(xid)) {
      const auto sm = detail::as_matrix(tp.value(sid).values(), O, C);
      auto dx = detail::as_matrix(tp.grad(xid), C, t_in);
      dx.noalias() += sm.transpose() * dz;
    }
  });
}

// Elementwise max(0, x); the subgradient at 0 is 0.
template <typename T>
Var<T> relu(const Var<T>& x) {
  Tensor<T> out = x.value();
  for (auto& v : out.values()) v = v > T(0) ? v : T(0);
  const std::size_t xid = x.id;
  return x.tape->push(std::move(out), x.requires_grad(), [xid](Tape<T>& tp, std::size_t self) {
    const auto& g = tp.grad(self);
    const auto& in = tp.value(xid).values();
    auto& dx = tp.grad(xid);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (in[i] > T(0)) dx[i] += g[i];
  });
}

template <typename T>
Var<T> subtract(const Var<T>& a, const Var<T>& b) {
  detail::require(a.shape() == b.shape(), "subtract: shape mismatch " + shape_string(a.shape()) + " vs " +
                                              shape_string(b.shape()));
  Tensor<T> out = a.value();
  const auto& bv = b.value().values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  const std::size_t aid = a.id, bid = b.id;
  return a.tape->push(std::move(out), a.requires_grad() || b.requires_grad(), [aid, bid](Tape<T>& tp, std::size_t self) {
    const auto& g = tp.grad(self);
    if (tp.requires_grad(aid)) {
      auto& da = tp.grad(aid);
      for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i];
    }
    if (tp.requires_grad(bid)) {
      auto& db = tp.grad(bid);
      for (std::size_t i = 0; i < g.size(); ++i) db[i] -= g[i];
    }
  });
}

// S[i, j] = <a_i, b_j> / (|a_i| |b_j|), with norms floored at 1e-12.
template <typename T>
Var<T> cosine_similarity_matrix(const Var<T>& a, const Var<T>& b) {
  const auto& as = a.shape();
  const auto& bs = b.shape();
  detail::require(as.size() == 2 && bs.size() == 2 && as[1] == bs[1],
                  "cosine_similarity_matrix: expected a[NxT], b[MxT], got " + shape_string(as) + ", " +
                      shape_string(bs));
  const auto N = as[0], M = bs[0], len = as[1];
  const T floor = static_cast<T>(kCosineNormFloor);

  struct Saved {
    RowMatrix<T> a_hat, b_hat;
    Eigen::Matrix<T, Eigen::Dynamic, 1> a_norm, b_norm;
  };
  auto saved = std::make_shared<Saved>();
  const auto am = detail::as_matrix(a.value().values(), N, len);
  const auto bm = detail::as_matrix(b.value().values(), M, len);
  saved->a_norm = am.rowwise().norm();
  saved->b_norm = bm.rowwise().norm();
  saved->a_hat = am;
  saved->b_hat = bm;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(N); ++i) saved->a_hat.row(i) /= std::max(saved->a_norm[i], floor);
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(M); ++j) saved->b_hat.row(j) /= std::max(saved->b_norm[j], floor);

  Tensor<T> out({N, M});
  detail::as_matrix(out.values(), N, M).noalias() = saved->a_hat * saved->b_hat.transpose();

  const std::size_t aid = a.id, bid = b.id;
  const bool needs = a.requires_grad() || b.requires_grad();
  return a.tape->push(std::move(out), needs, [=](Tape<T>& tp, std::size_t self) {
    const auto ds = detail::as_matrix(tp.grad(self), N, M);
    // Gradient through x / max(|x|, floor) for each row.
    const auto through_norm = [floor](const RowMatrix<T>& d_hat, const RowMatrix<T>& hat,
                                      const Eigen::Matrix<T, Eigen::Dynamic, 1>& norms, auto&& dst) {
      for (Eigen::Index r = 0; r < hat.rows(); ++r) {
        if (norms[r] > floor) {
          dst.row(r) += (d_hat.row(r) - d_hat.row(r).dot(hat.row(r)) * hat.row(r)) / norms[r];
        } else {
          dst.row(r) += d_hat.row(r) / floor;
        }
      }
    };
    if (tp.requires_grad(aid)) {
      const RowMatrix<T> da_hat = ds * saved->b_hat;
      through_norm(da_hat, saved->a_hat, saved->a_norm, detail::as_matrix(tp.grad(aid), N, len));
    }
    if (tp.requires_grad(bid)) {
      const RowMatrix<T> db_hat = ds.transpose() * saved->a_hat;
      through_norm(db_hat, saved->b_hat, saved->b_norm, detail::as_matrix(tp.grad(bid), M, len));
    }
  });
}

// Scalar logit = sum_i v_i * d_i over the row-major flattening of d; no bias.
template <typename T>
Var<T> linear_readout(const Var<T>& d, const Var<T>& v) {
  detail::require(d.value().size() == v.value().size(),
                  "linear_readout: " + std::to_string(d.value().size()) + " inputs but " +
                      std::to_string(v.value().size()) + " weights");
  const auto& dv = d.value().values();
  const auto& vv = v.value().values();
  T acc = T(0);
  for (std::size_t i = 0; i < dv.size(); ++i) acc += vv[i] * dv[i];
  const std::size_t did = d.id, vid = v.id;
  return d.tape->push(Tensor<T>({1}, {acc}), d.requires_grad() || v.requires_grad(),
                      [did, vid](Tape<T>& tp, std::size_t self) {
                        const T g = tp.grad(self)[0];
                        if (tp.requires_grad(did)) {
                          auto& dd = tp.grad(did);
                          const auto& vv = tp.value(vid).values();
                          for (std::size_t i = 0; i < dd.size(); ++i) dd[i] += g * vv[i];
                        }
                        if (tp.requires_grad(vid)) {
                          auto& dv = tp.grad(vid);
                          const auto& dvals = tp.value(did).values();
                          for (std::size_t i = 0; i < dv.size(); ++i) dv[i] += g * dvals[i];
                        }
                      });
}

// 1 / (1 + e^-z), with the exponent kept non-positive for full relative
// precision in both tails.
template <typename T>
T sigmoid_value(T z) {
  if (z >= T(0)) return T(1) / (T(1) + std::exp(-z));
  const T e = std::exp(z);
  return e / (T(1) + e);
}

template <typename T>
Var<T> sigmoid(const Var<T>& z) {
  Tensor<T> out = z.value();
  for (auto& v : out.values()) v = sigmoid_value(v);
  const std::size_t zid = z.id;
  return z.tape->push(std::move(out), z.requires_grad(), [zid](Tape<T>& tp, std::size_t self) {
    const auto& g = tp.grad(self);
    const auto& y = tp.value(self).values();
    auto& dz = tp.grad(zid);
    for (std::size_t i = 0; i < g.size(); ++i) dz[i] += g[i] * y[i] * (T(1) - y[i]);
  });
}

template <typename T>
T bce_value(T y_hat, T y) {
  const T lo = static_cast<T>(kProbabilityClamp);
  const T p = std::clamp(y_hat, lo, T(1) - lo);
  return -(y * std::log(p) + (T(1) - y) * std::log(T(1) - p));
}

// Binary cross-entropy of a scalar probability against a 0/1 label.
template <typename T>
Var<T> bce_loss(const Var<T>& y_hat, T label) {
  if (label != T(0) && label != T(1)) throw Error("bce_loss: label must be 0 or 1");
  detail::require(y_hat.value().size() == 1, "bce_loss: prediction must be a scalar");
  const T p = y_hat.value()[0];
  const std::size_t pid = y_hat.id;
  return y_hat.tape->push(Tensor<T>({1}, {bce_value(p, label)}), y_hat.requires_grad(),
                          [pid, label](Tape<T>& tp, std::size_t self) {
                            const T lo = static_cast<T>(kProbabilityClamp);
                            const T p = tp.value(pid)[0];
                            if (p < lo || p > T(1) - lo) return;  // clamped: flat
                            tp.grad(pid)[0] += tp.grad(self)[0] * (-label / p + (T(1) - label) / (T(1) - p));
                          });
}

}  // namespace mmdec::autodiff
