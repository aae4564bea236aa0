#include "dpi/bayes.hpp"

#include <cmath>

#include "dpi/errors.hpp"

namespace dpi {

std::pair<Tensor, Tensor> decompose_variance(const Tensor& samples) {
  if (samples.shape.size() != 2 || samples.shape[1] != 2 || samples.shape[0] == 0)
    throw ShapeError("expected a T x 2 sample matrix, got " + samples.shape_str());
  const std::size_t T = samples.shape[0];
  for (std::size_t t = 0; t < T; ++t) {
    double s = samples.at(t, 0) + samples.at(t, 1);
    if (std::abs(s - 1.0) > 1e-9)
      throw DataError("sample row " + std::to_string(t) + " sums to " +
                      std::to_string(s) + ", not 1");
  }

  double mean[2] = {0.0, 0.0};
  for (std::size_t t = 0; t < T; ++t) {
    mean[0] += samples.at(t, 0);
    mean[1] += samples.at(t, 1);
  }
  mean[0] /= double(T);
  mean[1] /= double(T);

  Tensor epistemic = Tensor::zeros({2, 2});
  Tensor aleatoric = Tensor::zeros({2, 2});
  for (std::size_t t = 0; t < T; ++t) {
    const double y[2] = {samples.at(t, 0), samples.at(t, 1)};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        epistemic.at(std::size_t(i), std::size_t(j)) +=
            (y[i] - mean[i]) * (y[j] - mean[j]);
        aleatoric.at(std::size_t(i), std::size_t(j)) +=
            (i == j ? y[i] : 0.0) - y[i] * y[j];
      }
  }
  for (double& v : epistemic.data) v /= double(T);
  for (double& v : aleatoric.data) v /= double(T);
  return {epistemic, aleatoric};
}

MCPrediction mc_predict(DpiModel& model, const chem::MolGraph& g,
                        const Tensor& protein, const MCDropoutConfig& cfg) {
  if (cfg.T < 1) throw ConfigError("MC sample count must be at least 1");
  model.set_dropout_rate(cfg.dropout_rate);

  MCPrediction out;
  out.samples = Tensor::zeros({cfg.T, 2});
  for (std::size_t t = 0; t < cfg.T; ++t) {
    Rng rng(Rng::derive(cfg.rng_seed, t));
    Tensor p = model.predict_one(g, protein, ad::DropoutMask::Mode::mc_sample,
                                 &rng);
    out.samples.at(t, 0) = p.data[0];
    out.samples.at(t, 1) = p.data[1];
  }

  out.mean = Tensor::zeros({2});
  for (std::size_t t = 0; t < cfg.T; ++t) {
    out.mean.data[0] += out.samples.at(t, 0);
    out.mean.data[1] += out.samples.at(t, 1);
  }
  out.mean.data[0] /= double(cfg.T);
  out.mean.data[1] /= double(cfg.T);

  auto [epi, ale] = decompose_variance(out.samples);
  out.epistemic = epi;
  out.aleatoric = ale;
  return out;
}

UncertaintyKind parse_uncertainty_kind(const std::string& name) {
  if (name == "epistemic") return UncertaintyKind::epistemic;
  if (name == "aleatoric") return UncertaintyKind::aleatoric;
  if (name == "total") return UncertaintyKind::total;
  throw ConfigError("unknown uncertainty kind '" + name +
                    "' (want epistemic, aleatoric or total)");
}

std::string uncertainty_kind_name(UncertaintyKind kind) {
  switch (kind) {
    case UncertaintyKind::epistemic: return "epistemic";
    case UncertaintyKind::aleatoric: return "aleatoric";
    default: return "total";
  }
}

double confidence_score(const MCPrediction& p, UncertaintyKind kind) {
  auto trace = [](const Tensor& m) { return m.at(0, 0) + m.at(1, 1); };
  switch (kind) {
    case UncertaintyKind::epistemic: return -trace(p.epistemic);
    case UncertaintyKind::aleatoric: return -trace(p.aleatoric);
    default: return -(trace(p.epistemic) + trace(p.aleatoric));
  }
}

}  // namespace dpi
