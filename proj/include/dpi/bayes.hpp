#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "dpi/model.hpp"
#include "dpi/tensor.hpp"

namespace dpi {

struct MCDropoutConfig {
  std::size_t T = 30;
  double dropout_rate = 0.1;
  std::uint64_t rng_seed = 0;
};

struct MCPrediction {
  Tensor samples;    // T x 2 softmax rows
  Tensor mean;       // {2}
  Tensor epistemic;  // {2, 2}
  Tensor aleatoric;  // {2, 2}
};

// Epistemic part: sample covariance of the softmax outputs around their
// mean. Aleatoric part: average of the per-sample multinomial covariance
// diag(y) - y y^T. Rows must each sum to 1 within 1e-9.
std::pair<Tensor, Tensor> decompose_variance(const Tensor& samples);

// T stochastic forward passes with dropout kept on, each with its own rng
// stream derived from (rng_seed, t). Applies cfg.dropout_rate to the model
// before sampling.
MCPrediction mc_predict(DpiModel& model, const chem::MolGraph& g,
                        const Tensor& protein, const MCDropoutConfig& cfg);

enum class UncertaintyKind { epistemic, aleatoric, total };

UncertaintyKind parse_uncertainty_kind(const std::string& name);
std::string uncertainty_kind_name(UncertaintyKind kind);

// Higher is more confident; the score is the negated trace of the selected
// uncertainty matrix, so it only carries ranking semantics.
double confidence_score(const MCPrediction& p, UncertaintyKind kind);

}  // namespace dpi
