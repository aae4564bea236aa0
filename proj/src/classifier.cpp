#include "dpi/classifier.hpp"

#include <cmath>

#include "dpi/errors.hpp"
#include "dpi/init.hpp"

namespace dpi {

namespace {

bool is_row_like(const Tensor& x) {
  return x.shape.size() == 1 || (x.shape.size() == 2 && x.shape[0] == 1);
}

}  // namespace

Tensor concat_features(const Tensor& x_p, const Tensor& x_d) {
  if (!is_row_like(x_p) || !is_row_like(x_d))
    throw ShapeError("concat_features expects vectors, got " + x_p.shape_str() +
                     " and " + x_d.shape_str());
  for (double v : x_p.data)
    if (!std::isfinite(v)) throw DataError("non-finite protein feature");
  for (double v : x_d.data)
    if (!std::isfinite(v)) throw DataError("non-finite drug feature");
  Tensor out = Tensor::zeros({1, x_p.data.size() + x_d.data.size()});
  std::copy(x_p.data.begin(), x_p.data.end(), out.data.begin());
  std::copy(x_d.data.begin(), x_d.data.end(),
            out.data.begin() + std::ptrdiff_t(x_p.data.size()));
  return out;
}

ad::Var concat_features(ad::Tape& t, ad::Var x_p, ad::Var x_d) {
  return t.concat_cols({x_p, x_d});
}

ClassifierHead::ClassifierHead(ad::ParamStore& store,
                               const ClassifierConfig& cfg, Rng& init_rng,
                               const std::string& prefix)
    : cfg_(cfg) {
  if (cfg.in_dim == 0) throw ConfigError("classifier input width must be positive");
  if (cfg.hidden == 0) throw ConfigError("classifier hidden width must be positive");
  if (cfg.dropout_rate < 0.0 || cfg.dropout_rate >= 1.0)
    throw ConfigError("dropout rate must lie in [0, 1)");

  const std::size_t dims[4] = {cfg.in_dim, cfg.hidden, cfg.hidden, 2};
  for (int l = 0; l < 3; ++l) {
    const std::size_t din = dims[l], dout = dims[l + 1];
    Layer layer;
    layer.W = &store.add(prefix + ".fc" + std::to_string(l) + ".W",
                         kaiming_uniform({din, dout}, din, init_rng), true);
    layer.b = &store.add(prefix + ".fc" + std::to_string(l) + ".b",
                         Tensor::zeros({dout}), false);
    layers_.push_back(layer);
  }
}

ad::Var ClassifierHead::predict(ad::Tape& t, ad::Var x,
                                ad::DropoutMask::Mode mode, Rng* rng) const {
  const Tensor& xv = t.value(x);
  if (xv.shape.size() != 2 || xv.shape[1] != cfg_.in_dim)
    throw ShapeError("classifier expects m x " + std::to_string(cfg_.in_dim) +
                     " input, got " + xv.shape_str());
  if (mode != ad::DropoutMask::Mode::off && rng == nullptr)
    throw ConfigError("stochastic classifier pass needs an rng");

  ad::Var h = x;
  for (int l = 0; l < 3; ++l) {
    h = t.add_row_bias(t.matmul(h, t.param(*layers_[l].W)),
                       t.param(*layers_[l].b));
    if (l == 2) break;
    h = t.relu(h);
    if (mode != ad::DropoutMask::Mode::off) {
      ad::DropoutMask m = ad::DropoutMask::make(t.value(h).shape,
                                                cfg_.dropout_rate, mode, *rng);
      h = t.dropout(h, m);
    }
  }
  return t.softmax(h);
}


void ClassifierHead::set_dropout_rate(double rate) {
  if (rate < 0.0 || rate >= 1.0)
    throw ConfigError("dropout rate must lie in [0, 1)");
  cfg_.dropout_rate = rate;
}

}  // namespace dpi
