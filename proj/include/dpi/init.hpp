#pragma once

#include <cmath>
#include <vector>

#include "dpi/rng.hpp"
#include "dpi/tensor.hpp"

namespace dpi {

// Kaiming-style uniform init: entries drawn from U(-a, a), a = sqrt(2/fan_in).
inline Tensor kaiming_uniform(const std::vector<std::size_t>& shape,
                              std::size_t fan_in, Rng& rng) {
  Tensor t = Tensor::zeros(shape);
  const double a = std::sqrt(2.0 / double(fan_in));
  for (double& x : t.data) x = rng.uniform(-a, a);
  return t;
}

}  // namespace dpi
