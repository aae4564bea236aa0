#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dpi {

// Dense row-major tensor of 64-bit floats. Ranks 1 and 2 cover almost the
// whole pipeline; rank 3 appears only as conv kernels [out][in][k].
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s);
  Tensor(std::vector<std::size_t> s, std::vector<double> d);

  static Tensor zeros(std::vector<std::size_t> s) { return Tensor(std::move(s)); }
  static Tensor full(std::vector<std::size_t> s, double v);
  static Tensor vec(std::vector<double> v);                      // shape {n}
  static Tensor row(std::vector<double> v);                      // shape {1, n}
  static Tensor matrix(std::size_t r, std::size_t c, std::vector<double> d);

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  double& at(std::size_t i, std::size_t j) { return data[i * cols() + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols() + j]; }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
  bool all_finite() const;
  std::string shape_str() const;
};

std::string shape_to_string(const std::vector<std::size_t>& s);

}  // namespace dpi
