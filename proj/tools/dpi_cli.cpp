// Command-line harness: training, evaluation, single-pair prediction, the
// three uncertainty experiments, SMILES diagnostics and synthetic data
// generation. JSON summaries go to stdout, CSV artifacts to --out.

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dpi/bayes.hpp"
#include "dpi/dataset.hpp"
#include "dpi/errors.hpp"
#include "dpi/experiments.hpp"
#include "dpi/metrics.hpp"
#include "dpi/model.hpp"
#include "dpi/smiles.hpp"
#include "dpi/synthetic.hpp"
#include "dpi/train.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Settings {
  // model architecture (desk-scale defaults; see README)
  int graph_hidden = 32;
  int graph_layers = 3;
  int protein_dim = 32;
  int protein_channels = 4;
  int head_hidden = 64;
  double dropout_rate = 0.1;
  std::uint64_t init_seed = 2024;
  // optimization
  int epochs = 50;
  double lr = 0.001;
  int batch = 32;
  double lambda = 0.001;
  int patience = 20;
  std::uint64_t seed = 0;
  // MC dropout
  int mc_samples = 30;
  std::uint64_t mc_seed = 0;
  // stub protein embedder
  std::uint64_t stub_seed = 2024;
};

int parse_int(const std::string& v, const std::string& key) {
  std::size_t used = 0;
  int out;
  try {
    out = std::stoi(v, &used);
  } catch (const std::exception&) {
    throw dpi::ConfigError("config key " + key + ": bad integer '" + v + "'");
  }
  if (used != v.size())
    throw dpi::ConfigError("config key " + key + ": bad integer '" + v + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
  std::size_t used = 0;
  std::uint64_t out;
  try {
    out = std::stoull(v, &used);
  } catch (const std::exception&) {
    throw dpi::ConfigError("config key " + key + ": bad integer '" + v + "'");
  }
  if (used != v.size())
    throw dpi::ConfigError("config key " + key + ": bad integer '" + v + "'");
  return out;
}

double parse_f64(const std::string& v, const std::string& key) {
  std::size_t used = 0;
  double out;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw dpi::ConfigError("config key " + key + ": bad number '" + v + "'");
  }
  if (used != v.size())
    throw dpi::ConfigError("config key " + key + ": bad number '" + v + "'");
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Applies `key = value` lines to the settings. Keys already pinned by an
// explicit command-line flag keep the flag's value.
void apply_config_file(const std::string& path, Settings& s,
                       const std::function<bool(const std::string&)>& flag_given) {
  std::ifstream in(path);
  if (!in) throw dpi::DataError("cannot open config file " + path);

  const std::map<std::string, std::function<void(const std::string&)>> setters = {
      {"graph_hidden", [&](const std::string& v) { s.graph_hidden = parse_int(v, "graph_hidden"); }},
      {"graph_layers", [&](const std::string& v) { s.graph_layers = parse_int(v, "graph_layers"); }},
      {"protein_dim", [&](const std::string& v) { s.protein_dim = parse_int(v, "protein_dim"); }},
      {"protein_channels", [&](const std::string& v) { s.protein_channels = parse_int(v, "protein_channels"); }},
      {"head_hidden", [&](const std::string& v) { s.head_hidden = parse_int(v, "head_hidden"); }},
      {"dropout_rate", [&](const std::string& v) { s.dropout_rate = parse_f64(v, "dropout_rate"); }},
      {"init_seed", [&](const std::string& v) { s.init_seed = parse_u64(v, "init_seed"); }},
      {"epochs", [&](const std::string& v) { s.epochs = parse_int(v, "epochs"); }},
      {"lr", [&](const std::string& v) { s.lr = parse_f64(v, "lr"); }},
      {"batch", [&](const std::string& v) { s.batch = parse_int(v, "batch"); }},
      {"lambda", [&](const std::string& v) { s.lambda = parse_f64(v, "lambda"); }},
      {"patience", [&](const std::string& v) { s.patience = parse_int(v, "patience"); }},
      {"seed", [&](const std::string& v) { s.seed = parse_u64(v, "seed"); }},
      {"mc_samples", [&](const std::string& v) { s.mc_samples = parse_int(v, "mc_samples"); }},
      {"mc_seed", [&](const std::string& v) { s.mc_seed = parse_u64(v, "mc_seed"); }},
      {"stub_seed", [&](const std::string& v) { s.stub_seed = parse_u64(v, "stub_seed"); }},
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw dpi::ConfigError(path + ":" + std::to_string(lineno) +
                             ": expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end())
      throw dpi::ConfigError(path + ":" + std::to_string(lineno) +
                             ": unknown config key '" + key + "'");
    std::string flag = "--" + key;
    for (char& c : flag)
      if (c == '_') c = '-';
    if (!flag_given(flag)) it->second(value);
  }
}

void add_settings_options(CLI::App* sub, Settings& s) {
  sub->add_option("--graph-hidden", s.graph_hidden, "GraphNet hidden width");
  sub->add_option("--graph-layers", s.graph_layers, "GraphNet layer count");
  sub->add_option("--protein-dim", s.protein_dim, "protein embedding width");
  sub->add_option("--protein-channels", s.protein_channels, "protein conv channels");
  sub->add_option("--head-hidden", s.head_hidden, "classifier hidden width");
  sub->add_option("--dropout-rate", s.dropout_rate, "dropout rate for every block");
  sub->add_option("--init-seed", s.init_seed, "weight init seed");
  sub->add_option("--epochs", s.epochs, "max training epochs (<= 200)");
  sub->add_option("--lr", s.lr, "Adam learning rate");
  sub->add_option("--batch", s.batch, "minibatch size");
  sub->add_option("--lambda", s.lambda, "L2 coefficient");
  sub->add_option("--patience", s.patience, "early-stop patience (epochs)");
  sub->add_option("--seed", s.seed, "shuffle/split/training seed");
  sub->add_option("--mc-samples", s.mc_samples, "MC dropout sample count (0 = plain)");
  sub->add_option("--mc-seed", s.mc_seed, "MC dropout sampling seed");
  sub->add_option("--stub-seed", s.stub_seed, "stub protein embedder seed");
}

dpi::ModelConfig model_config(const Settings& s) {
  dpi::ModelConfig cfg;
  cfg.graph_hidden = s.graph_hidden;
  cfg.graph_layers = s.graph_layers;
  cfg.protein_dim = s.protein_dim;
  cfg.protein_channels = s.protein_channels;
  cfg.head_hidden = s.head_hidden;
  cfg.dropout_rate = s.dropout_rate;
  cfg.init_seed = s.init_seed;
  return cfg;
}

dpi::TrainConfig train_config(const Settings& s) {
  dpi::TrainConfig cfg;
  cfg.epochs = s.epochs;
  cfg.lr = s.lr;
  cfg.batch = s.batch;
  cfg.lambda = s.lambda;
  cfg.patience = s.patience;
  cfg.seed = s.seed;
  return cfg;
}

dpi::MCDropoutConfig mc_config(const Settings& s, double model_rate,
                               bool rate_flag_given) {
  dpi::MCDropoutConfig cfg;
  cfg.T = std::size_t(std::max(1, s.mc_samples));
  cfg.dropout_rate = rate_flag_given ? s.dropout_rate : model_rate;
  cfg.rng_seed = s.mc_seed;
  return cfg;
}

// Loads data with stub width matched to the model; embedding rows must have
// the model's width too.
dpi::IngestReport load_dataset(const std::string& data_path,
                               const std::string& emb_path, int protein_dim,
                               std::uint64_t stub_seed) {
  std::map<std::string, dpi::ProteinEmbedding> emb;
  if (!emb_path.empty()) {
    emb = dpi::load_embeddings(emb_path);
    for (const auto& [id, e] : emb)
      if (int(e.dim()) != protein_dim)
        throw dpi::DataError(emb_path + ": embedding '" + id + "' has width " +
                             std::to_string(e.dim()) + ", model expects " +
                             std::to_string(protein_dim));
  }
  dpi::StubEmbedder stub{.dim = protein_dim, .seed = stub_seed};
  return dpi::ingest(data_path, emb, stub);
}

json metrics_json(const dpi::MetricsReport& m) {
  json subsets = json::array();
  for (const auto& s : m.subsets)
    subsets.push_back({{"name", s.name},
                       {"count", s.count},
                       {"roc_auc", s.roc_auc},
                       {"accuracy", s.accuracy}});
  return {{"roc_auc", m.roc_auc},
          {"accuracy", m.accuracy},
          {"precision", m.precision},
          {"recall", m.recall},
          {"subsets", subsets}};
}

json split_json(const dpi::DatasetSplit& split) {
  return {{"train", split.train.size()},
          {"valid", split.valid.size()},
          {"test", split.test.size()}};
}

void ensure_out_dir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw dpi::DataError("cannot create output directory " + out);
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw dpi::DataError("cannot write " + path);
  out << body;
}

// Same resolution rule as dataset ingestion, for one protein token.
dpi::Tensor resolve_protein(const std::string& token,
                            const std::map<std::string, dpi::ProteinEmbedding>& emb,
                            const dpi::StubEmbedder& stub) {
  auto it = emb.find(token);
  dpi::Tensor vec;
  if (it != emb.end()) {
    vec = dpi::pool(it->second);
  } else {
    bool sequence = !token.empty();
    for (char c : token)
      sequence = sequence && std::isupper(static_cast<unsigned char>(c));
    if (!sequence) throw dpi::DataError("unknown protein id '" + token + "'");
    vec = dpi::pool(dpi::stub_embed(token, stub));
  }
  vec.shape = {1, vec.data.size()};
  return vec;
}

std::vector<double> scores_for(dpi::DpiModel& model,
                               const std::vector<dpi::InteractionRecord>& recs,
                               const Settings& s, bool rate_flag_given) {
  if (s.mc_samples > 0)
    return predict_scores_mc(
        model, recs, mc_config(s, model.config().dropout_rate, rate_flag_given));
  return predict_scores(model, recs);
}

int run_train(const Settings& s, const std::string& data,
              const std::string& emb, const std::string& out) {
  ensure_out_dir(out);
  dpi::IngestReport report = load_dataset(data, emb, s.protein_dim, s.stub_seed);
  dpi::DatasetSplit split = dpi::split_random(std::move(report.records), s.seed);

  dpi::DpiModel model(model_config(s));
  dpi::TrainResult result = dpi::train(model, split, train_config(s));

  const std::string ckpt = (fs::path(out) / "checkpoint.ckpt").string();
  dpi::save_checkpoint(model, ckpt);
  const std::string hist = (fs::path(out) / "history.csv").string();
  dpi::write_history_csv(result.history, hist);

  dpi::MetricsReport test_metrics =
      dpi::evaluate(predict_scores(model, split.test), split.test, split.train);

  json j = {{"command", "train"},
            {"data", data},
            {"ingested", split.train.size() + split.valid.size() + split.test.size()},
            {"bad_rows", report.bad_rows.size()},
            {"split", split_json(split)},
            {"epochs_run", result.history.size()},
            {"best_epoch", result.best_epoch},
            {"best_val_auc", result.best_val_auc},
            {"checkpoint", ckpt},
            {"history_csv", hist},
            {"test", metrics_json(test_metrics)}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_evaluate(const Settings& s, const std::string& ckpt,
                 const std::string& data, const std::string& emb,
                 const std::string& out, bool rate_flag_given) {
  auto model = dpi::load_checkpoint(ckpt);
  dpi::IngestReport report =
      load_dataset(data, emb, model->config().protein_dim, s.stub_seed);
  dpi::DatasetSplit split = dpi::split_random(std::move(report.records), s.seed);

  std::vector<double> scores = scores_for(*model, split.test, s, rate_flag_given);
  dpi::MetricsReport metrics = dpi::evaluate(scores, split.test, split.train);

  json j = {{"command", "evaluate"},
            {"checkpoint", ckpt},
            {"data", data},
            {"split", split_json(split)},
            {"mc_samples", s.mc_samples},
            {"metrics", metrics_json(metrics)}};
  if (!out.empty()) {
    ensure_out_dir(out);
    const std::string path = (fs::path(out) / "metrics.json").string();
    write_text(path, j.dump(2) + "\n");
    j["metrics_json"] = path;
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_predict(const Settings& s, const std::string& ckpt,
                const std::string& smiles, const std::string& protein,
                const std::string& emb_path, bool rate_flag_given) {
  auto model = dpi::load_checkpoint(ckpt);
  dpi::chem::MolGraph graph = dpi::chem::featurize(dpi::chem::parse_smiles(smiles));

  std::map<std::string, dpi::ProteinEmbedding> emb;
  if (!emb_path.empty()) emb = dpi::load_embeddings(emb_path);
  dpi::StubEmbedder stub{.dim = model->config().protein_dim, .seed = s.stub_seed};
  dpi::Tensor vec = resolve_protein(protein, emb, stub);
  if (int(vec.data.size()) != model->config().protein_dim)
    throw dpi::DataError("protein width " + std::to_string(vec.data.size()) +
                         " does not match the model's " +
                         std::to_string(model->config().protein_dim));

  json j = {{"command", "predict"}, {"smiles", smiles}, {"protein", protein}};
  if (s.mc_samples > 0) {
    dpi::MCPrediction pred = dpi::mc_predict(
        *model, graph, vec,
        mc_config(s, model->config().dropout_rate, rate_flag_given));
    j["mc_samples"] = s.mc_samples;
    j["p_no_interaction"] = pred.mean.data[0];
    j["p_interaction"] = pred.mean.data[1];
    j["label"] = pred.mean.data[1] >= 0.5 ? 1 : 0;
    j["epistemic_trace"] = pred.epistemic.at(0, 0) + pred.epistemic.at(1, 1);
    j["aleatoric_trace"] = pred.aleatoric.at(0, 0) + pred.aleatoric.at(1, 1);
    j["confidence"] = {
        {"epistemic", confidence_score(pred, dpi::UncertaintyKind::epistemic)},
        {"aleatoric", confidence_score(pred, dpi::UncertaintyKind::aleatoric)},
        {"total", confidence_score(pred, dpi::UncertaintyKind::total)}};
  } else {
    dpi::Tensor p = model->predict_one(graph, vec,
                                       dpi::ad::DropoutMask::Mode::off, nullptr);
    j["mc_samples"] = 0;
    j["p_no_interaction"] = p.data[0];
    j["p_interaction"] = p.data[1];
    j["label"] = p.data[1] >= 0.5 ? 1 : 0;
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_noise_sweep(const Settings& s, const std::string& ckpt,
                    const std::string& data, const std::string& emb,
                    const std::string& out, const std::vector<double>& sigmas,
                    std::uint64_t noise_seed, bool rate_flag_given) {
  ensure_out_dir(out);
  auto model = dpi::load_checkpoint(ckpt);
  dpi::IngestReport report =
      load_dataset(data, emb, model->config().protein_dim, s.stub_seed);
  dpi::DatasetSplit split = dpi::split_random(std::move(report.records), s.seed);

  dpi::NoiseConfig cfg;
  if (!sigmas.empty()) cfg.sigmas = sigmas;
  cfg.seed = noise_seed;
  cfg.mc = mc_config(s, model->config().dropout_rate, rate_flag_given);
  std::vector<dpi::NoiseRow> rows = dpi::noise_sweep(*model, split.test, cfg);

  const std::string csv = (fs::path(out) / "noise_sweep.csv").string();
  dpi::write_noise_csv(rows, csv);

  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back({{"sigma", r.sigma},
                   {"roc_auc_mc", r.roc_auc_mc},
                   {"roc_auc_plain", r.roc_auc_plain}});
  json j = {{"command", "noise-sweep"},
            {"checkpoint", ckpt},
            {"test_pairs", split.test.size()},
            {"csv", csv},
            {"rows", arr}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_size_sweep(const Settings& s, const std::string& data,
                   const std::string& emb, const std::string& out,
                   const std::vector<double>& fractions, bool rate_flag_given) {
  ensure_out_dir(out);
  dpi::IngestReport report = load_dataset(data, emb, s.protein_dim, s.stub_seed);
  dpi::DatasetSplit split = dpi::split_random(std::move(report.records), s.seed);

  dpi::SizeConfig cfg;
  if (!fractions.empty()) cfg.fractions = fractions;
  cfg.model = model_config(s);
  cfg.train = train_config(s);
  cfg.mc = mc_config(s, s.dropout_rate, rate_flag_given);
  std::vector<dpi::SizeRow> rows = dpi::size_sweep(split, cfg);

  const std::string csv = (fs::path(out) / "size_sweep.csv").string();
  dpi::write_size_csv(rows, csv);

  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back({{"fraction", r.fraction},
                   {"epistemic", r.epistemic_mean},
                   {"aleatoric", r.aleatoric_mean}});
  json j = {{"command", "size-sweep"},
            {"data", data},
            {"csv", csv},
            {"rows", arr}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_confidence_curve(const Settings& s, const std::string& ckpt,
                         const std::string& data, const std::string& emb,
                         const std::string& out, const std::string& kind,
                         bool rate_flag_given) {
  ensure_out_dir(out);
  auto model = dpi::load_checkpoint(ckpt);
  dpi::IngestReport report =
      load_dataset(data, emb, model->config().protein_dim, s.stub_seed);
  dpi::DatasetSplit split = dpi::split_random(std::move(report.records), s.seed);

  std::vector<dpi::UncertaintyKind> kinds;
  if (kind == "all")
    kinds = {dpi::UncertaintyKind::epistemic, dpi::UncertaintyKind::aleatoric,
             dpi::UncertaintyKind::total};
  else
    kinds = {dpi::parse_uncertainty_kind(kind)};

  dpi::MCDropoutConfig mc =
      mc_config(s, model->config().dropout_rate, rate_flag_given);
  std::vector<dpi::CurvePoint> points;
  for (dpi::UncertaintyKind k : kinds) {
    std::vector<dpi::CurvePoint> part =
        dpi::confidence_curve(*model, split.test, k, mc);
    points.insert(points.end(), part.begin(), part.end());
  }

  const std::string csv = (fs::path(out) / "confidence_curve.csv").string();
  dpi::write_curve_csv(points, csv);

  json arr = json::array();
  for (const auto& p : points)
    arr.push_back({{"kind", p.kind},
                   {"percentile", p.percentile},
                   {"accuracy", p.accuracy}});
  json j = {{"command", "confidence-curve"},
            {"checkpoint", ckpt},
            {"test_pairs", split.test.size()},
            {"csv", csv},
            {"points", arr}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_parse_smiles(const std::string& smiles, bool features) {
  dpi::chem::Molecule mol = dpi::chem::parse_smiles(smiles);

  json atoms = json::array();
  for (std::size_t i = 0; i < mol.atoms.size(); ++i) {
    const dpi::chem::Atom& a = mol.atoms[i];
    atoms.push_back({{"index", i},
                     {"element", a.element},
                     {"charge", a.formal_charge},
                     {"aromatic", a.aromatic},
                     {"degree", a.degree},
                     {"implicit_h", a.implicit_h},
                     {"total_h", mol.total_h(int(i))},
                     {"in_ring", a.in_ring},
                     {"ring_sizes", a.ring_sizes}});
  }
  json bonds = json::array();
  for (const dpi::chem::Bond& b : mol.bonds)
    bonds.push_back({{"a", b.a},
                     {"b", b.b},
                     {"order", dpi::chem::bond_order_name(b.order)},
                     {"in_ring", b.in_ring},
                     {"conjugated", b.conjugated},
                     {"ring_sizes", b.ring_sizes}});

  json j = {{"command", "parse-smiles"},
            {"smiles", smiles},
            {"atoms", atoms},
            {"bonds", bonds},
            {"rings", mol.rings}};

  if (features) {
    dpi::chem::MolGraph g = dpi::chem::featurize(mol);
    json node_rows = json::array();
    for (int i = 0; i < g.n; ++i) {
      json row = json::array();
      for (int c = 0; c < dpi::chem::kNodeFeatDim; ++c)
        row.push_back(g.node_feats.at(std::size_t(i), std::size_t(c)));
      node_rows.push_back(row);
    }
    json edge_rows = json::array();
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      json row = json::array();
      for (int c = 0; c < dpi::chem::kEdgeFeatDim; ++c)
        row.push_back(g.edge_feats.at(e, std::size_t(c)));
      edge_rows.push_back({{"from", g.edges[e].first},
                           {"to", g.edges[e].second},
                           {"features", row}});
    }
    j["node_features"] = node_rows;
    j["edge_features"] = edge_rows;
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_gen_synthetic(const dpi::SyntheticConfig& cfg, const std::string& out) {
  std::vector<dpi::SyntheticRow> rows = dpi::gen_synthetic_rows(cfg);
  std::size_t positives = 0;
  for (const auto& r : rows) positives += std::size_t(r.label);

  std::ofstream file(out);
  if (!file) throw dpi::DataError("cannot write " + out);
  file << "smiles\tprotein\tlabel\n";
  for (const auto& r : rows)
    file << r.smiles << '\t' << r.protein << '\t' << r.label << '\n';
  file.close();

  json j = {{"command", "gen-synthetic"},
            {"path", out},
            {"pairs", rows.size()},
            {"positives", positives},
            {"flip_prob", cfg.flip_prob},
            {"seed", cfg.seed}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian drug-protein interaction engine"};
  app.require_subcommand(1);

  Settings s;
  std::string config_path, data, emb, out, ckpt, smiles, protein;
  std::string kind = "all", sigmas_arg, fractions_arg;
  std::uint64_t noise_seed = 0;
  bool features = false;

  CLI::App* train = app.add_subcommand("train", "train a model and checkpoint the best epoch");
  train->add_option("--config", config_path, "key = value settings file");
  train->add_option("--data", data, "interaction TSV")->required();
  train->add_option("--embeddings", emb, "protein embedding TSV");
  train->add_option("--out", out, "output directory")->required();
  add_settings_options(train, s);

  CLI::App* evaluate = app.add_subcommand("evaluate", "score a held-out split from a checkpoint");
  evaluate->add_option("--config", config_path, "key = value settings file");
  evaluate->add_option("--checkpoint", ckpt, "model checkpoint")->required();
  evaluate->add_option("--data", data, "interaction TSV")->required();
  evaluate->add_option("--embeddings", emb, "protein embedding TSV");
  evaluate->add_option("--out", out, "output directory for metrics.json");
  add_settings_options(evaluate, s);

  CLI::App* predict = app.add_subcommand("predict", "predict one drug-protein pair");
  predict->add_option("--config", config_path, "key = value settings file");
  predict->add_option("--checkpoint", ckpt, "model checkpoint")->required();
  predict->add_option("--smiles", smiles, "drug SMILES")->required();
  predict->add_option("--protein", protein, "protein id or sequence")->required();
  predict->add_option("--embeddings", emb, "protein embedding TSV");
  add_settings_options(predict, s);

  CLI::App* noise = app.add_subcommand("noise-sweep", "ROC-AUC under Gaussian protein noise");
  noise->add_option("--config", config_path, "key = value settings file");
  noise->add_option("--checkpoint", ckpt, "model checkpoint")->required();
  noise->add_option("--data", data, "interaction TSV")->required();
  noise->add_option("--embeddings", emb, "protein embedding TSV");
  noise->add_option("--out", out, "output directory")->required();
  noise->add_option("--sigmas", sigmas_arg, "comma-separated noise levels (default 0..0.5)");
  noise->add_option("--noise-seed", noise_seed, "noise realization seed");
  add_settings_options(noise, s);

  CLI::App* size = app.add_subcommand("size-sweep", "uncertainty vs training-set size");
  size->add_option("--config", config_path, "key = value settings file");
  size->add_option("--data", data, "interaction TSV")->required();
  size->add_option("--embeddings", emb, "protein embedding TSV");
  size->add_option("--out", out, "output directory")->required();
  size->add_option("--fractions", fractions_arg, "comma-separated fractions (default 1,0.5,0.25)");
  add_settings_options(size, s);

  CLI::App* curve = app.add_subcommand("confidence-curve", "accuracy by confidence percentile");
  curve->add_option("--config", config_path, "key = value settings file");
  curve->add_option("--checkpoint", ckpt, "model checkpoint")->required();
  curve->add_option("--data", data, "interaction TSV")->required();
  curve->add_option("--embeddings", emb, "protein embedding TSV");
  curve->add_option("--out", out, "output directory")->required();
  curve->add_option("--kind", kind, "epistemic, aleatoric, total or all");
  add_settings_options(curve, s);

  CLI::App* parse = app.add_subcommand("parse-smiles", "atom/bond diagnostics for one SMILES");
  parse->add_option("--smiles", smiles, "input SMILES")->required();
  parse->add_flag("--features", features, "include feature matrices");

  dpi::SyntheticConfig syn;
  CLI::App* gen = app.add_subcommand("gen-synthetic", "write a planted-rule dataset");
  gen->add_option("--pairs", syn.pairs, "number of pairs");
  gen->add_option("--flip-prob", syn.flip_prob, "label flip probability");
  gen->add_option("--seed", syn.seed, "generator seed");
  gen->add_option("--drugs-per-class", syn.drugs_per_class, "drug pool size per family");
  gen->add_option("--proteins-per-cluster", syn.proteins_per_cluster, "protein pool size per cluster");
  gen->add_option("--out", out, "output TSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, returns 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  auto flag_given = [sub](const std::string& flag) {
    return sub->get_option_no_throw(flag) != nullptr && sub->count(flag) > 0;
  };

  try {
    if (!config_path.empty()) apply_config_file(config_path, s, flag_given);

    auto parse_list = [](const std::string& arg, const char* what) {
      std::vector<double> out_list;
      std::size_t start = 0;
      while (start <= arg.size() && !arg.empty()) {
        std::size_t comma = arg.find(',', start);
        std::string piece = arg.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        out_list.push_back(parse_f64(trim(piece), what));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      return out_list;
    };

    if (sub == train) return run_train(s, data, emb, out);
    if (sub == evaluate)
      return run_evaluate(s, ckpt, data, emb, out, flag_given("--dropout-rate"));
    if (sub == predict)
      return run_predict(s, ckpt, smiles, protein, emb, flag_given("--dropout-rate"));
    if (sub == noise)
      return run_noise_sweep(s, ckpt, data, emb, out,
                             parse_list(sigmas_arg, "sigmas"), noise_seed,
                             flag_given("--dropout-rate"));
    if (sub == size)
      return run_size_sweep(s, data, emb, out,
                            parse_list(fractions_arg, "fractions"),
                            flag_given("--dropout-rate"));
    if (sub == curve)
      return run_confidence_curve(s, ckpt, data, emb, out, kind,
                                  flag_given("--dropout-rate"));
    if (sub == parse) return run_parse_smiles(smiles, features);
    if (sub == gen) return run_gen_synthetic(syn, out);
    std::cerr << "unhandled subcommand\n";
    return 3;
  } catch (const dpi::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dpi::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dpi::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
