#pragma once

#include <cstdint>
#include <vector>

#include "dpi/autodiff.hpp"
#include "dpi/tensor.hpp"

namespace dpi::ad {

// Adam with bias correction. Moment tensors are allocated on first step and
// indexed like the store.
struct AdamState {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t step = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
};

// One update over every parameter in the store. Requires a preceding
// backward(); zeroes all gradients afterwards.
void adam_step(AdamState& state, ParamStore& params);

}  // namespace dpi::ad
