// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "dsd/errors.hpp"

namespace dsd {

// Dense row-major tensor of 64-bit reals. Rank 0 (scalar), 1 and 2 are the
// only shapes the rest of the code produces.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::vector<std::size_t> s, std::vector<double> d);

  static Tensor scalar(double v);
  static Tensor zeros(std::vector<std::size_t> s);
  static Tensor full(std::vector<std::size_t> s, double v);
  // Glorot-uniform init for a [fan_in x fan_out] matrix.
  static Tensor glorot(std::size_t fan_in, std::size_t fan_out,
                       std::mt19937_64& rng);
  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) vector of length dim, the usual
  // linear-layer bias init. Keeping biases off zero avoids rows that sit
  // exactly on activation kinks.
  static Tensor bias_uniform(std::size_t fan_in, std::size_t dim,
                             std::mt19937_64& rng);

  std::size_t numel() const;
  bool is_scalar() const { return numel() == 1 && shape.size() <= 1; }
  std::size_t rows() const;
  std::size_t cols() const;

  double& at(std::size_t i, std::size_t j);
  double at(std::size_t i, std::size_t j) const;

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

std::size_t shape_numel(const std::vector<std::size_t>& shape);

}  // namespace dsd
