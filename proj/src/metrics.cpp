#include "dpi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "dpi/errors.hpp"

namespace dpi {

double roc_auc(const std::vector<std::pair<double, int>>& scored) {
  std::size_t pos = 0, neg = 0;
  for (const auto& [s, y] : scored) {
    if (y != 0 && y != 1) throw DataError("label outside {0,1}");
    if (!std::isfinite(s)) throw DataError("non-finite score");
    (y == 1 ? pos : neg)++;
  }
  if (pos == 0 || neg == 0)
    throw DataError("ROC-AUC needs both classes, got " + std::to_string(pos) +
                    " positive and " + std::to_string(neg) + " negative");

  std::vector<std::size_t> order(scored.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scored[a].first < scored[b].first;
  });

  // average ranks over tie groups, then the Mann-Whitney statistic
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() &&
           scored[order[j]].first == scored[order[i]].first)
      ++j;
    const double avg_rank = 0.5 * (double(i + 1) + double(j));  // 1-based
    for (std::size_t k = i; k < j; ++k)
      if (scored[order[k]].second == 1) pos_rank_sum += avg_rank;
    i = j;
  }
  const double p = double(pos);
  return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * double(neg));
}

PRA precision_recall_accuracy(const std::vector<double>& scores,
                              const std::vector<int>& labels,
                              double threshold) {
  if (scores.empty()) throw DataError("empty prediction set");
  if (scores.size() != labels.size())
    throw DataError("got " + std::to_string(scores.size()) + " scores for " +
                    std::to_string(labels.size()) + " labels");

  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pred = scores[i] >= threshold;
    const bool truth = labels[i] == 1;
    if (pred && truth) ++tp;
    else if (pred) ++fp;
    else if (truth) ++fn;
    else ++tn;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  PRA out;
  out.precision = (tp + fp) ? double(tp) / double(tp + fp) : nan;
  out.recall = (tp + fn) ? double(tp) / double(tp + fn) : nan;
  out.accuracy = double(tp + tn) / double(scores.size());
  return out;
}

SubsetBreakdown subset_breakdown(const std::vector<EntityKey>& test,
                                 const std::vector<EntityKey>& train) {
  std::set<std::string> proteins, drugs;
  for (const auto& k : train) {
    proteins.insert(k.protein);
    drugs.insert(k.smiles);
  }
  SubsetBreakdown out;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const bool p_seen = proteins.count(test[i].protein) > 0;
    const bool d_seen = drugs.count(test[i].smiles) > 0;
    (p_seen ? (d_seen ? out.seen_seen : out.seen_unseen)
            : (d_seen ? out.unseen_seen : out.unseen_unseen))
        .push_back(i);
  }
  return out;
}

}  // namespace dpi
