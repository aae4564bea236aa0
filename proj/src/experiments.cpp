#include "dpi/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dpi/errors.hpp"

namespace dpi {

namespace {

double trace2(const Tensor& m) { return m.at(0, 0) + m.at(1, 1); }

std::vector<std::pair<double, int>> scored_pairs(
    const std::vector<double>& scores,
    const std::vector<InteractionRecord>& recs) {
  std::vector<std::pair<double, int>> out(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i)
    out[i] = {scores[i], recs[i].label};
  return out;
}

}  // namespace

std::vector<NoiseRow> noise_sweep(DpiModel& model,
                                  const std::vector<InteractionRecord>& test,
                                  const NoiseConfig& cfg) {
  if (test.empty()) throw DataError("empty test set");
  for (double s : cfg.sigmas)
    if (s < 0.0 || !std::isfinite(s))
      throw ConfigError("noise sigma must be non-negative");

  std::vector<NoiseRow> rows;
  for (std::size_t si = 0; si < cfg.sigmas.size(); ++si) {
    const double sigma = cfg.sigmas[si];
    std::vector<InteractionRecord> noisy = test;
    if (sigma > 0.0) {
      Rng rng(Rng::derive(cfg.seed, 0x6e6f6973u + si));  // tag: "nois" + index
      for (auto& rec : noisy)
        for (double& v : rec.protein_vec.data) v += rng.normal(0.0, sigma);
    }
    NoiseRow row;
    row.sigma = sigma;
    row.roc_auc_plain = roc_auc(scored_pairs(predict_scores(model, noisy), noisy));
    row.roc_auc_mc =
        roc_auc(scored_pairs(predict_scores_mc(model, noisy, cfg.mc), noisy));
    rows.push_back(row);
  }
  return rows;
}

std::vector<SizeRow> size_sweep(const DatasetSplit& split, const SizeConfig& cfg) {
  if (cfg.fractions.empty()) throw ConfigError("no fractions requested");
  for (double f : cfg.fractions)
    if (f <= 0.0 || f > 1.0)
      throw ConfigError("fractions must lie in (0, 1]");

  // one shuffle shared by every fraction: prefixes are nested
  std::vector<std::size_t> order(split.train.size());
  std::iota(order.begin(), order.end(), std::size_t(0));
  Rng rng(Rng::derive(cfg.train.seed, 0x73697a65));  // tag: "size"
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.index(i)]);

  std::vector<SizeRow> rows;
  for (double fraction : cfg.fractions) {
    const std::size_t take =
        std::max<std::size_t>(1, std::size_t(fraction * double(split.train.size())));
    if (take < std::size_t(cfg.train.batch))
      throw DataError("fraction " + std::to_string(fraction) +
                      " leaves fewer records than one batch");
    DatasetSplit sub;
    sub.valid = split.valid;
    sub.test = split.test;
    sub.train.reserve(take);
    for (std::size_t i = 0; i < take; ++i)
      sub.train.push_back(split.train[order[i]]);

    DpiModel model(cfg.model);
    train(model, sub, cfg.train);

    double epi = 0.0, ale = 0.0;
    for (std::size_t i = 0; i < split.test.size(); ++i) {
      MCDropoutConfig per = cfg.mc;
      per.rng_seed = Rng::derive(cfg.mc.rng_seed, i);
      MCPrediction pred = mc_predict(model, split.test[i].graph,
                                     split.test[i].protein_vec, per);
      epi += trace2(pred.epistemic);
      ale += trace2(pred.aleatoric);
    }
    SizeRow row;
    row.fraction = fraction;
    row.epistemic_mean = epi / double(split.test.size());
    row.aleatoric_mean = ale / double(split.test.size());
    rows.push_back(row);
  }
  return rows;
}

std::vector<CurvePoint> confidence_curve(DpiModel& model,
                                         const std::vector<InteractionRecord>& test,
                                         UncertaintyKind kind,
                                         const MCDropoutConfig& cfg) {
  if (test.empty()) throw DataError("empty test set");

  std::vector<double> confidence(test.size());
  std::vector<bool> correct(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    MCDropoutConfig per = cfg;
    per.rng_seed = Rng::derive(cfg.rng_seed, i);
    MCPrediction pred = mc_predict(model, test[i].graph, test[i].protein_vec, per);
    confidence[i] = confidence_score(pred, kind);
    const int predicted = pred.mean.data[1] >= 0.5 ? 1 : 0;
    correct[i] = predicted == test[i].label;
  }

  return curve_from_scores(confidence, correct, kind);
}

std::vector<CurvePoint> curve_from_scores(const std::vector<double>& confidence,
                                          const std::vector<bool>& correct,
                                          UncertaintyKind kind) {
  if (confidence.empty() || confidence.size() != correct.size())
    throw DataError("confidence/correctness size mismatch");

  std::vector<std::size_t> order(confidence.size());
  std::iota(order.begin(), order.end(), std::size_t(0));
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return confidence[a] > confidence[b];
  });

  std::vector<CurvePoint> points;
  for (int percentile = 10; percentile <= 100; percentile += 10) {
    const std::size_t count = std::max<std::size_t>(
        1, std::size_t(percentile) * confidence.size() / 100);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < count; ++i) hits += correct[order[i]] ? 1 : 0;
    CurvePoint p;
    p.kind = uncertainty_kind_name(kind);
    p.percentile = percentile;
    p.accuracy = double(hits) / double(count);
    points.push_back(std::move(p));
  }
  return points;
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

namespace {

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

}  // namespace

void write_noise_csv(const std::vector<NoiseRow>& rows, const std::string& path) {
  std::ofstream out = open_csv(path);
  out << "sigma,roc_auc_mc,roc_auc_plain\n";
  for (const auto& r : rows)
    out << format_double(r.sigma) << ',' << format_double(r.roc_auc_mc) << ','
        << format_double(r.roc_auc_plain) << '\n';
}

void write_size_csv(const std::vector<SizeRow>& rows, const std::string& path) {
  std::ofstream out = open_csv(path);
  out << "fraction,epistemic,aleatoric\n";
  for (const auto& r : rows)
    out << format_double(r.fraction) << ',' << format_double(r.epistemic_mean)
        << ',' << format_double(r.aleatoric_mean) << '\n';
}

void write_curve_csv(const std::vector<CurvePoint>& points,
                     const std::string& path) {
  std::ofstream out = open_csv(path);
  out << "kind,percentile,accuracy\n";
  for (const auto& p : points)
    out << p.kind << ',' << p.percentile << ',' << format_double(p.accuracy)
        << '\n';
}

void write_history_csv(const std::vector<EpochStat>& history,
                       const std::string& path) {
  std::ofstream out = open_csv(path);
  out << "epoch,train_loss,val_auc\n";
  for (const auto& s : history)
    out << s.epoch << ',' << format_double(s.train_loss) << ','
        << format_double(s.val_auc) << '\n';
}

}  // namespace dpi
