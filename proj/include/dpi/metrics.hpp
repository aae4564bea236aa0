#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dpi {

// Rank-based (Mann-Whitney) ROC-AUC; tied scores contribute one half.
// Throws DataError unless both classes are present.
double roc_auc(const std::vector<std::pair<double, int>>& scored);

struct PRA {
  double precision;  // NaN when nothing was predicted positive
  double recall;     // NaN when no true positives exist
  double accuracy;
};

// Positive class is label 1; a score >= threshold predicts positive.
PRA precision_recall_accuracy(const std::vector<double>& scores,
                              const std::vector<int>& labels,
                              double threshold = 0.5);

// Membership of a test pair in the training set, entity by entity.
struct SubsetBreakdown {
  // indices into the test list, keyed by (protein seen, drug seen)
  std::vector<std::size_t> seen_seen;
  std::vector<std::size_t> seen_unseen;
  std::vector<std::size_t> unseen_seen;
  std::vector<std::size_t> unseen_unseen;
};

struct EntityKey {
  std::string smiles;
  std::string protein;
};

SubsetBreakdown subset_breakdown(const std::vector<EntityKey>& test,
                                 const std::vector<EntityKey>& train);

}  // namespace dpi
