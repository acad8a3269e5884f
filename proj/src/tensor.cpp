#include "asa/tensor.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "asa/errors.hpp"

namespace asa::nn {

std::size_t element_count(const Tensor::Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_to_string(const Tensor::Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += " x ";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), values_(element_count(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(values.begin(), values.end()) {
  if (element_count(shape_) != values_.size()) {
    throw UsageError("tensor shape " + shape_to_string(shape_) + " does not hold " +
                     std::to_string(values_.size()) + " values");
  }
}

void Tensor::fill(double value) { std::fill(values_.begin(), values_.end(), value); }

void Tensor::reshape(Shape shape) {
  if (element_count(shape) != values_.size()) {
    throw UsageError("cannot reshape " + shape_to_string(shape_) + " to " + shape_to_string(shape));
  }
  shape_ = std::move(shape);
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix, 0, Eigen::OuterStride<>>;
using MutMap = Eigen::Map<RowMatrix, 0, Eigen::OuterStride<>>;

ConstMap as_map(const MatrixView& m) {
  return ConstMap(m.data, static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols),
                  Eigen::OuterStride<>(static_cast<Eigen::Index>(m.stride)));
}

std::size_t op_rows(const MatrixView& m) { return m.transposed ? m.cols : m.rows; }
std::size_t op_cols(const MatrixView& m) { return m.transposed ? m.rows : m.cols; }

template <typename Lhs, typename Rhs>
void assign(MutMap& out, const Lhs& lhs, const Rhs& rhs, bool accumulate) {
  if (accumulate) {
    out.noalias() += lhs * rhs;
  } else {
    out.noalias() = lhs * rhs;
  }
}

}  // namespace

void gemm(MutableMatrixView out, MatrixView a, MatrixView b, bool accumulate) {
  if (op_cols(a) != op_rows(b) || op_rows(a) != out.rows || op_cols(b) != out.cols) {
    throw UsageError("gemm shape mismatch");
  }
  if (out.rows == 0 || out.cols == 0) return;
  MutMap c(out.data, static_cast<Eigen::Index>(out.rows), static_cast<Eigen::Index>(out.cols),
           Eigen::OuterStride<>(static_cast<Eigen::Index>(out.stride)));
  if (op_cols(a) == 0) {
    if (!accumulate) c.setZero();
    return;
  }
  const ConstMap ma = as_map(a);
  const ConstMap mb = as_map(b);
  if (!a.transposed && !b.transposed) {
    assign(c, ma, mb, accumulate);
  } else if (a.transposed && !b.transposed) {
    assign(c, ma.transpose(), mb, accumulate);
  } else if (!a.transposed && b.transposed) {
    assign(c, ma, mb.transpose(), accumulate);
  } else {
    assign(c, ma.transpose(), mb.transpose(), accumulate);
  }
}

}  // namespace asa::nn
