#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "mmdec/common/error.hpp"

namespace mmdec::autodiff {

using Shape = std::vector<std::size_t>;

inline std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "x" : "") + std::to_string(shape[i]);
  return s + "]";
}

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dense row-major array of real values.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Shape shape) : shape_(std::move(shape)), data_(element_count(shape_), T(0)) {}
  Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != element_count(shape_)) {
      throw Error("tensor of shape " + shape_string(shape_) + " needs " +
                  std::to_string(element_count(shape_)) + " values, got " + std::to_string(data_.size()));
    }
  }

  // Like the data constructor but also rejects non-finite values.
  static Tensor checked(Shape shape, std::vector<T> data) {
    if (!std::all_of(data.begin(), data.end(), [](T v) { return std::isfinite(v); })) {
      throw Error("tensor data contains non-finite values");
    }
    return Tensor(std::move(shape), std::move(data));
  }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return data_.size(); }

  const std::vector<T>& values() const { return data_; }
  std::vector<T>& values() { return data_; }
  const T* data() const { return data_.data(); }
  T* data() { return data_.data(); }
  T operator[](std::size_t i) const { return data_[i]; }
  T& operator[](std::size_t i) { return data_[i]; }

  // rows x cols view of a rank-2 tensor.
  Eigen::Map<const RowMatrix<T>> matrix() const {
    return {data_.data(), static_cast<Eigen::Index>(shape_.at(0)), static_cast<Eigen::Index>(shape_.at(1))};
  }
  Eigen::Map<RowMatrix<T>> matrix() {
    return {data_.data(), static_cast<Eigen::Index>(shape_.at(0)), static_cast<Eigen::Index>(shape_.at(1))};
  }

  template <typename U>
  Tensor<U> cast() const {
    return Tensor<U>(shape_, std::vector<U>(data_.begin(), data_.end()));
  }

  bool operator==(const Tensor& other) const = default;

 private:
  Shape shape_;
  std::vector<T> data_;
};

}  // namespace mmdec::autodiff
