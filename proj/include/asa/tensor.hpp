#pragma once

#include <cstddef>
#include <initializer_list>
#include <new>
#include <span>
#include <string>
#include <vector>

namespace asa::nn {

/// Cache-line aligned storage. Vectorized kernels pick their code path from
/// pointer alignment, so fixing it keeps floating-point results bitwise
/// reproducible from run to run.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlignment{64};

  AlignedAllocator() noexcept = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlignment)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlignment); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

using AlignedBuffer = std::vector<double, AlignedAllocator<double>>;

/// Dense row-major array of doubles with an explicit shape.
class Tensor {
 public:
  using Shape = std::vector<std::size_t>;

  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape_); }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double& at(std::size_t i, std::size_t j) { return values_[i * shape_[1] + j]; }
  double at(std::size_t i, std::size_t j) const { return values_[i * shape_[1] + j]; }
  double& at(std::size_t i, std::size_t j, std::size_t k) {
    return values_[(i * shape_[1] + j) * shape_[2] + k];
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const {
    return values_[(i * shape_[1] + j) * shape_[2] + k];
  }

  void fill(double value);
  /// Changes the shape; the element count must not change.
  void reshape(Shape shape);

  bool all_finite() const noexcept;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  AlignedBuffer values_;
};

std::string shape_to_string(const Tensor::Shape& shape);
std::size_t element_count(const Tensor::Shape& shape);

/// Strided row-major matrix view used by the GEMM kernel.
struct MatrixView {
  const double* data;
  std::size_t rows;
  std::size_t cols;
  std::size_t stride;
  bool transposed = false;

  MatrixView t() const { return {data, rows, cols, stride, !transposed}; }
};

struct MutableMatrixView {
  double* data;
  std::size_t rows;
  std::size_t cols;
  std::size_t stride;
};

inline MatrixView view(const double* data, std::size_t rows, std::size_t cols) {
  return {data, rows, cols, cols};
}
inline MutableMatrixView mutable_view(double* data, std::size_t rows, std::size_t cols) {
  return {data, rows, cols, cols};
}

/// out = op(a) * op(b) when `accumulate` is false, out += op(a) * op(b) otherwise.
void gemm(MutableMatrixView out, MatrixView a, MatrixView b, bool accumulate);

}  // namespace asa::nn
