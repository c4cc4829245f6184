#include "deid/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace deid {

namespace {
std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}
}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_product(shape_))
    throw std::invalid_argument("Tensor: data length " +
                                std::to_string(data_.size()) +
                                " does not match shape " + shape_str());
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
  return Tensor(std::move(shape));
}

Tensor Tensor::scalar(double v) { return Tensor({1, 1}, {v}); }

std::size_t Tensor::rows() const {
  if (shape_.size() != 2)
    throw std::logic_error("Tensor::rows: tensor is not rank-2, shape " +
                           shape_str());
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (shape_.size() != 2)
    throw std::logic_error("Tensor::cols: tensor is not rank-2, shape " +
                           shape_str());
  return shape_[1];
}

double& Tensor::at(std::size_t r, std::size_t c) {
  return data_[r * cols() + c];
}

double Tensor::at(std::size_t r, std::size_t c) const {
  return data_[r * shape_[1] + c];
}

double Tensor::scalar_value() const {
  if (size() != 1)
    throw std::logic_error("Tensor::scalar_value: shape " + shape_str());
  return data_[0];
}

void Tensor::fill(double v) {
  for (double& x : data_) x = v;
}

bool Tensor::all_finite() const {
  for (double x : data_)
    if (!std::isfinite(x)) return false;
  return true;
}

std::string Tensor::shape_str() const {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < shape_.size(); ++i)
    out << (i ? "," : "") << shape_[i];
  out << ")";
  return out.str();
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b))
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                a.shape_str() + " vs " + b.shape_str());
}

}  // namespace deid
