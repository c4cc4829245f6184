#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace deid {

// Dense row-major tensor of 64-bit floats. Everything in the model math is
// rank-2 in practice (scalars are 1x1, vectors 1xN), but the shape is kept
// general for the checkpoint format.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor scalar(double v);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c);
  double at(std::size_t r, std::size_t c) const;

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  double scalar_value() const;
  void fill(double v);
  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  bool all_finite() const;
  std::string shape_str() const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

// Throws std::invalid_argument naming both shapes when they differ.
void check_same_shape(const Tensor& a, const Tensor& b, const char* op);

}  // namespace deid
