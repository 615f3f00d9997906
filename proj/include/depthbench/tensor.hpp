#pragma once

#include <Eigen/Core>

#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "depthbench/common.hpp"

namespace depthbench {

// Dense n-dimensional array in row-major layout. Spatial tensors follow the
// height-width-channels convention (batch is implicit and fixed at one).
template <class Scalar>
class TensorT {
 public:
  using Index = Eigen::Index;
  using MatrixMap =
      Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using ConstMatrixMap = Eigen::Map<
      const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using VectorMap = Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>;
  using ConstVectorMap = Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>;
  using ArrayMap = Eigen::Map<Eigen::Array<Scalar, Eigen::Dynamic, 1>>;
  using ConstArrayMap = Eigen::Map<const Eigen::Array<Scalar, Eigen::Dynamic, 1>>;

  TensorT() = default;

  explicit TensorT(std::vector<Index> shape) : shape_(std::move(shape)) {
    Index total = 1;
    for (Index e : shape_) {
      if (e < 1) throw ShapeError("tensor extents must be >= 1");
      total *= e;
    }
    data_.assign(static_cast<std::size_t>(total), Scalar(0));
  }

  TensorT(std::initializer_list<Index> shape)
      : TensorT(std::vector<Index>(shape)) {}

  static TensorT zeros(std::vector<Index> shape) { return TensorT(std::move(shape)); }

  static TensorT full(std::vector<Index> shape, Scalar value) {
    TensorT t(std::move(shape));
    t.array() = value;
    return t;
  }

  const std::vector<Index>& shape() const { return shape_; }
  Index rank() const { return static_cast<Index>(shape_.size()); }
  Index extent(Index axis) const { return shape_.at(static_cast<std::size_t>(axis)); }
  Index size() const { return static_cast<Index>(data_.size()); }

  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }

  Scalar& operator[](Index flat) { return data_[static_cast<std::size_t>(flat)]; }
  Scalar operator[](Index flat) const { return data_[static_cast<std::size_t>(flat)]; }

  // Rank-3 height-width-channels accessors.
  Scalar& at(Index y, Index x, Index c) { return data_[flat3(y, x, c)]; }
  Scalar at(Index y, Index x, Index c) const { return data_[flat3(y, x, c)]; }

  // Rank-4 accessors for kernel tensors laid out kh-kw-in-out.
  Scalar& at(Index a, Index b, Index c, Index d) { return data_[flat4(a, b, c, d)]; }
  Scalar at(Index a, Index b, Index c, Index d) const { return data_[flat4(a, b, c, d)]; }

  Index height() const { return extent(0); }
  Index width() const { return extent(1); }
  Index channels() const { return extent(rank() - 1); }

  // Views over the flat storage.
  MatrixMap as_matrix(Index rows, Index cols) {
    check_view(rows * cols);
    return MatrixMap(data_.data(), rows, cols);
  }
  ConstMatrixMap as_matrix(Index rows, Index cols) const {
    check_view(rows * cols);
    return ConstMatrixMap(data_.data(), rows, cols);
  }
  VectorMap as_vector() { return VectorMap(data_.data(), size()); }
  ConstVectorMap as_vector() const { return ConstVectorMap(data_.data(), size()); }
  ArrayMap array() { return ArrayMap(data_.data(), size()); }
  ConstArrayMap array() const { return ConstArrayMap(data_.data(), size()); }

  bool same_shape(const TensorT& other) const { return shape_ == other.shape_; }

  template <class Other>
  TensorT<Other> cast() const {
    TensorT<Other> out(shape_);
    for (Index i = 0; i < size(); ++i)
      out[i] = static_cast<Other>(data_[static_cast<std::size_t>(i)]);
    return out;
  }

  std::string shape_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
      if (i) s += "x";
      s += std::to_string(shape_[i]);
    }
    return s + "]";
  }

 private:
  std::size_t flat3(Index y, Index x, Index c) const {
    return static_cast<std::size_t>((y * shape_[1] + x) * shape_[2] + c);
  }
  std::size_t flat4(Index a, Index b, Index c, Index d) const {
    return static_cast<std::size_t>(((a * shape_[1] + b) * shape_[2] + c) * shape_[3] + d);
  }
  void check_view(Index n) const {
    if (n != size()) throw ShapeError("tensor view extent mismatch: " + shape_string());
  }

  std::vector<Index> shape_;
  std::vector<Scalar> data_;
};

using TensorF = TensorT<float>;
using TensorD = TensorT<double>;

}  // namespace depthbench
