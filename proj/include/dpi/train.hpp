#pragma once

#include <cstdint>
#include <vector>

#include "dpi/bayes.hpp"
#include "dpi/dataset.hpp"
#include "dpi/metrics.hpp"
#include "dpi/model.hpp"

namespace dpi {

struct TrainConfig {
  int epochs = 200;
  double lr = 0.001;
  int batch = 32;
  double lambda = 0.001;  // L2 coefficient on weight matrices
  int patience = 20;      // epochs without a validation ROC-AUC gain
  std::uint64_t seed = 0;
};

struct EpochStat {
  int epoch = 0;        // 1-based
  double train_loss = 0.0;  // mean cross-entropy per example plus L2 term
  double val_auc = 0.0;
};

struct TrainResult {
  std::vector<EpochStat> history;
  int best_epoch = 0;
  double best_val_auc = 0.0;
};

// Minibatch Adam on cross-entropy with L2 weight decay. Dropout runs in
// train mode. The model is left holding the parameters of the epoch with
// the best validation ROC-AUC, never the last one.
TrainResult train(DpiModel& model, const DatasetSplit& split,
                  const TrainConfig& cfg);

// Class-1 scores from a single deterministic pass (dropout off).
std::vector<double> predict_scores(const DpiModel& model,
                                   const std::vector<InteractionRecord>& recs);

// Class-1 component of the MC-dropout predictive mean; record i uses the
// rng stream derived from (cfg.rng_seed, i) so scoring order is irrelevant.
std::vector<double> predict_scores_mc(DpiModel& model,
                                      const std::vector<InteractionRecord>& recs,
                                      const MCDropoutConfig& cfg);

struct SubsetMetrics {
  std::string name;
  std::size_t count = 0;
  double roc_auc;  // NaN when undefined (single class or empty)
  double accuracy;
};

struct MetricsReport {
  double roc_auc;
  double accuracy;
  double precision;
  double recall;
  std::vector<SubsetMetrics> subsets;  // seen/unseen protein x drug
};

// Metrics over `test`; the seen/unseen breakdown is relative to `train`.
MetricsReport evaluate(const std::vector<double>& scores,
                       const std::vector<InteractionRecord>& test,
                       const std::vector<InteractionRecord>& train);

}  // namespace dpi
