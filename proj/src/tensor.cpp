// SPDX-License-Identifier: Apache-2.0
#include "dsd/tensor.hpp"

#include <cmath>

namespace dsd {

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

Tensor::Tensor(std::vector<std::size_t> s, std::vector<double> d)
    : shape(std::move(s)), data(std::move(d)) {
  if (shape_numel(shape) != data.size())
    throw ShapeMismatch("tensor data length does not match shape");
}

Tensor Tensor::scalar(double v) { return Tensor({}, {v}); }

Tensor Tensor::zeros(std::vector<std::size_t> s) {
  std::size_t n = shape_numel(s);
  return Tensor(std::move(s), std::vector<double>(n, 0.0));
}

Tensor Tensor::full(std::vector<std::size_t> s, double v) {
  std::size_t n = shape_numel(s);
  return Tensor(std::move(s), std::vector<double>(n, v));
}

Tensor Tensor::glorot(std::size_t fan_in, std::size_t fan_out,
                      std::mt19937_64& rng) {
  double limit = std::sqrt(6.0 / double(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Tensor t = Tensor::zeros({fan_in, fan_out});
  for (double& v : t.data) v = dist(rng);
  return t;
}

Tensor Tensor::bias_uniform(std::size_t fan_in, std::size_t dim,
                            std::mt19937_64& rng) {
  double limit = 1.0 / std::sqrt(double(fan_in));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Tensor t = Tensor::zeros({dim});
  for (double& v : t.data) v = dist(rng);
  return t;
}

std::size_t Tensor::numel() const { return shape_numel(shape); }

std::size_t Tensor::rows() const {
  if (shape.size() != 2) throw ShapeMismatch("rows() on non-matrix tensor");
  return shape[0];
}

std::size_t Tensor::cols() const {
  if (shape.size() != 2) throw ShapeMismatch("cols() on non-matrix tensor");
  return shape[1];
}

double& Tensor::at(std::size_t i, std::size_t j) {
  return data[i * cols() + j];
}

double Tensor::at(std::size_t i, std::size_t j) const {
  return data[i * cols() + j];
}

}  // namespace dsd
