#include "dpi/optim.hpp"

#include <cmath>

#include "dpi/errors.hpp"

namespace dpi::ad {

void adam_step(AdamState& state, ParamStore& params) {
  if (!params.grads_ready()) {
    throw StateError("adam_step called before backward populated gradients");
  }
  if (state.m.empty()) {
    for (std::size_t i = 0; i < params.count(); ++i) {
      state.m.push_back(Tensor::zeros(params.at(i).value.shape));
      state.v.push_back(Tensor::zeros(params.at(i).value.shape));
    }
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.count(); ++i) {
    Parameter& p = params.at(i);
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    if (!m.same_shape(p.value)) {
      throw StateError("adam moment shape drifted for " + p.name);
    }
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const double g = p.grad.data[j];
      m.data[j] = state.beta1 * m.data[j] + (1.0 - state.beta1) * g;
      v.data[j] = state.beta2 * v.data[j] + (1.0 - state.beta2) * g * g;
      const double mhat = m.data[j] / bc1;
      const double vhat = v.data[j] / bc2;
      p.value.data[j] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
  params.zero_grads();
}

}  // namespace dpi::ad
