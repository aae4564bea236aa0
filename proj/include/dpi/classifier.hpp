#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dpi/autodiff.hpp"
#include "dpi/rng.hpp"
#include "dpi/tensor.hpp"

namespace dpi {

// Joint drug-protein feature: the protein vector occupies the leading
// positions, the drug readout the trailing ones.
Tensor concat_features(const Tensor& x_p, const Tensor& x_d);
ad::Var concat_features(ad::Tape& t, ad::Var x_p, ad::Var x_d);

struct ClassifierConfig {
  std::size_t in_dim = 0;      // protein dim + drug readout dim
  std::size_t hidden = 512;
  double dropout_rate = 0.1;
};

// Three fully connected layers (in -> hidden -> hidden -> 2) with ReLU
// between them, dropout after the two hidden activations, softmax output.
class ClassifierHead {
 public:
  ClassifierHead(ad::ParamStore& store, const ClassifierConfig& cfg,
                 Rng& init_rng, const std::string& prefix = "head");

  // x is one row per pair, width cfg.in_dim. Returns softmax rows (m x 2).
  ad::Var predict(ad::Tape& t, ad::Var x, ad::DropoutMask::Mode mode,
                  Rng* rng) const;

  struct Layer {
    ad::Parameter* W = nullptr;
    ad::Parameter* b = nullptr;
  };
  const std::vector<Layer>& layer_params() const { return layers_; }
  const ClassifierConfig& config() const { return cfg_; }
  void set_dropout_rate(double rate);

 private:
  ClassifierConfig cfg_;
  std::vector<Layer> layers_;
};

}  // namespace dpi
