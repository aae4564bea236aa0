#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpi/bayes.hpp"
#include "dpi/dataset.hpp"
#include "dpi/train.hpp"

namespace dpi {

// Gaussian perturbation of the pooled protein embeddings at test time,
// i.i.d. N(0, sigma^2) per feature. The same noise realization at a given
// sigma feeds both the MC and the plain evaluation.
struct NoiseConfig {
  std::vector<double> sigmas = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::uint64_t seed = 0;
  MCDropoutConfig mc;
};

struct NoiseRow {
  double sigma = 0.0;
  double roc_auc_mc = 0.0;
  double roc_auc_plain = 0.0;
};

std::vector<NoiseRow> noise_sweep(DpiModel& model,
                                  const std::vector<InteractionRecord>& test,
                                  const NoiseConfig& cfg);

// Trains one model per training-set fraction; the fractions are nested
// prefixes of one seeded shuffle, so only the size varies. Reports the mean
// uncertainty traces over the fixed test set.
struct SizeConfig {
  std::vector<double> fractions = {1.0, 0.5, 0.25};
  ModelConfig model;
  TrainConfig train;
  MCDropoutConfig mc;
};

struct SizeRow {
  double fraction = 0.0;
  double epistemic_mean = 0.0;
  double aleatoric_mean = 0.0;
};

std::vector<SizeRow> size_sweep(const DatasetSplit& split, const SizeConfig& cfg);

// Accuracy over the top-p% most confident test predictions, p in
// 10,20,...,100, under the given uncertainty kind.
struct CurvePoint {
  std::string kind;
  int percentile = 0;
  double accuracy = 0.0;
};

std::vector<CurvePoint> confidence_curve(DpiModel& model,
                                         const std::vector<InteractionRecord>& test,
                                         UncertaintyKind kind,
                                         const MCDropoutConfig& cfg);

// Decile accuracies over points ranked by confidence (descending, ties in
// stable input order). Each decile covers max(1, p*n/100) points.
std::vector<CurvePoint> curve_from_scores(const std::vector<double>& confidence,
                                          const std::vector<bool>& correct,
                                          UncertaintyKind kind);

// Plot-ready CSV artifacts. Numbers are printed with 17 significant digits
// so reruns with one seed are byte-identical.
void write_noise_csv(const std::vector<NoiseRow>& rows, const std::string& path);
void write_size_csv(const std::vector<SizeRow>& rows, const std::string& path);
void write_curve_csv(const std::vector<CurvePoint>& points, const std::string& path);
void write_history_csv(const std::vector<EpochStat>& history, const std::string& path);

std::string format_double(double v);

}  // namespace dpi
