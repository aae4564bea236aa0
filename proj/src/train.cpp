#include "dpi/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dpi/errors.hpp"
#include "dpi/optim.hpp"

namespace dpi {

namespace {

// Mean cross-entropy over the batch rows plus (lambda/2) * sum of squared
// weight-matrix entries, matching the usual per-step weight-decay reading
// of a summed-objective-with-L2 formulation.
ad::Var batch_loss(ad::Tape& t, ad::Var probs, const std::vector<int>& labels,
                   double lambda) {
  ad::Var data_term =
      t.scale(t.cross_entropy(probs, labels), 1.0 / double(labels.size()));
  if (lambda == 0.0) return data_term;
  std::vector<ad::Var> terms{data_term};
  for (const auto& [p, leaf] : t.touched())
    if (p->is_weight) terms.push_back(t.scale(t.sum_squares(leaf), lambda / 2.0));
  return t.add_scalars(terms);
}

std::vector<double> snapshot(const ad::ParamStore& store) {
  std::vector<double> out;
  for (std::size_t i = 0; i < store.count(); ++i) {
    const auto& d = store.at(i).value.data;
    out.insert(out.end(), d.begin(), d.end());
  }
  return out;
}

void restore(ad::ParamStore& store, const std::vector<double>& flat) {
  std::size_t off = 0;
  for (std::size_t i = 0; i < store.count(); ++i) {
    auto& d = store.at(i).value.data;
    std::copy(flat.begin() + std::ptrdiff_t(off),
              flat.begin() + std::ptrdiff_t(off + d.size()), d.begin());
    off += d.size();
  }
}

double validation_auc(const DpiModel& model,
                      const std::vector<InteractionRecord>& valid) {
  std::vector<double> scores = predict_scores(model, valid);
  std::vector<std::pair<double, int>> scored(valid.size());
  for (std::size_t i = 0; i < valid.size(); ++i)
    scored[i] = {scores[i], valid[i].label};
  return roc_auc(scored);
}

}  // namespace

TrainResult train(DpiModel& model, const DatasetSplit& split,
                  const TrainConfig& cfg) {
  if (cfg.epochs < 1 || cfg.epochs > 200)
    throw ConfigError("epochs must lie in [1, 200]");
  if (cfg.batch < 1) throw ConfigError("batch size must be positive");
  if (cfg.lr < 0.0) throw ConfigError("learning rate must be non-negative");
  if (cfg.lambda < 0.0) throw ConfigError("L2 lambda must be non-negative");
  if (cfg.patience < 1) throw ConfigError("patience must be positive");
  if (split.train.empty()) throw DataError("empty training split");
  if (split.valid.empty()) throw DataError("empty validation split");

  ad::AdamState adam;
  adam.lr = cfg.lr;

  TrainResult result;
  result.best_val_auc = -std::numeric_limits<double>::infinity();
  std::vector<double> best_params = snapshot(model.params());

  const std::size_t n = split.train.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng shuffle_rng(Rng::derive(cfg.seed, 0x10000u + std::uint64_t(epoch)));
    for (std::size_t i = n - 1; i > 0; --i)
      std::swap(order[i], order[shuffle_rng.index(i + 1)]);
    Rng drop_rng(Rng::derive(cfg.seed, 0x20000u + std::uint64_t(epoch)));

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += std::size_t(cfg.batch)) {
      const std::size_t end = std::min(n, start + std::size_t(cfg.batch));
      std::vector<const chem::MolGraph*> graphs;
      std::vector<int> labels;
      Tensor proteins =
          Tensor::zeros({end - start, std::size_t(model.config().protein_dim)});
      for (std::size_t i = start; i < end; ++i) {
        const InteractionRecord& rec = split.train[order[i]];
        graphs.push_back(&rec.graph);
        labels.push_back(rec.label);
        for (std::size_t c = 0; c < proteins.shape[1]; ++c)
          proteins.at(i - start, c) = rec.protein_vec.data[c];
      }

      ad::Tape t;
      ad::Var probs = model.forward(t, graphs, proteins,
                                    ad::DropoutMask::Mode::train, &drop_rng);
      ad::Var loss = batch_loss(t, probs, labels, cfg.lambda);
      const double loss_val = t.value(loss).data[0];
      if (!std::isfinite(loss_val)) {
        std::ostringstream msg;
        msg << "non-finite loss at epoch " << epoch << ", batch row offsets";
        for (std::size_t i = start; i < end; ++i) msg << ' ' << order[i];
        msg << "; consider a smaller learning rate (current " << cfg.lr << ")";
        throw StateError(msg.str());
      }
      epoch_loss += loss_val * double(end - start);
      t.backward(loss);
      ad::adam_step(adam, model.params());
    }

    EpochStat stat;
    stat.epoch = epoch;
    stat.train_loss = epoch_loss / double(n);
    stat.val_auc = validation_auc(model, split.valid);
    result.history.push_back(stat);

    if (stat.val_auc > result.best_val_auc) {
      result.best_val_auc = stat.val_auc;
      result.best_epoch = epoch;
      best_params = snapshot(model.params());
    } else if (epoch - result.best_epoch >= cfg.patience) {
      break;
    }
  }

  restore(model.params(), best_params);
  return result;
}

std::vector<double> predict_scores(const DpiModel& model,
                                   const std::vector<InteractionRecord>& recs) {
  std::vector<double> out;
  out.reserve(recs.size());
  for (const auto& rec : recs) {
    Tensor p = model.predict_one(rec.graph, rec.protein_vec,
                                 ad::DropoutMask::Mode::off, nullptr);
    out.push_back(p.data[1]);
  }
  return out;
}

std::vector<double> predict_scores_mc(DpiModel& model,
                                      const std::vector<InteractionRecord>& recs,
                                      const MCDropoutConfig& cfg) {
  std::vector<double> out;
  out.reserve(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    MCDropoutConfig per = cfg;
    per.rng_seed = Rng::derive(cfg.rng_seed, i);
    MCPrediction pred = mc_predict(model, recs[i].graph, recs[i].protein_vec, per);
    out.push_back(pred.mean.data[1]);
  }
  return out;
}

namespace {

double guarded_auc(const std::vector<std::pair<double, int>>& scored) {
  try {
    return roc_auc(scored);
  } catch (const DataError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

MetricsReport evaluate(const std::vector<double>& scores,
                       const std::vector<InteractionRecord>& test,
                       const std::vector<InteractionRecord>& train) {
  if (scores.size() != test.size())
    throw DataError("score/test size mismatch");
  std::vector<std::pair<double, int>> scored(test.size());
  std::vector<int> labels(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    scored[i] = {scores[i], test[i].label};
    labels[i] = test[i].label;
  }

  MetricsReport report;
  report.roc_auc = roc_auc(scored);
  PRA pra = precision_recall_accuracy(scores, labels);
  report.precision = pra.precision;
  report.recall = pra.recall;
  report.accuracy = pra.accuracy;

  std::vector<EntityKey> test_keys(test.size()), train_keys(train.size());
  for (std::size_t i = 0; i < test.size(); ++i)
    test_keys[i] = {test[i].smiles, test[i].protein};
  for (std::size_t i = 0; i < train.size(); ++i)
    train_keys[i] = {train[i].smiles, train[i].protein};
  SubsetBreakdown breakdown = subset_breakdown(test_keys, train_keys);

  auto add_subset = [&](const std::string& name,
                        const std::vector<std::size_t>& idx) {
    SubsetMetrics m;
    m.name = name;
    m.count = idx.size();
    if (idx.empty()) {
      m.roc_auc = m.accuracy = std::numeric_limits<double>::quiet_NaN();
    } else {
      std::vector<std::pair<double, int>> sub;
      std::size_t correct = 0;
      for (std::size_t i : idx) {
        sub.push_back(scored[i]);
        correct += (scores[i] >= 0.5) == (labels[i] == 1) ? 1u : 0u;
      }
      m.roc_auc = guarded_auc(sub);
      m.accuracy = double(correct) / double(idx.size());
    }
    report.subsets.push_back(m);
  };
  add_subset("seen_protein_seen_drug", breakdown.seen_seen);
  add_subset("seen_protein_unseen_drug", breakdown.seen_unseen);
  add_subset("unseen_protein_seen_drug", breakdown.unseen_seen);
  add_subset("unseen_protein_unseen_drug", breakdown.unseen_unseen);
  return report;
}

}  // namespace dpi
