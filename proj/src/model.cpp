#include "dpi/model.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "dpi/errors.hpp"

namespace dpi {

DpiModel::DpiModel(const ModelConfig& cfg) : cfg_(cfg) {
  if (cfg.protein_dim <= 0) throw ConfigError("protein_dim must be positive");
  if (cfg.head_hidden <= 0) throw ConfigError("head_hidden must be positive");
  Rng init(cfg.init_seed);

  GraphNetConfig gc;
  gc.hidden = cfg.graph_hidden;
  gc.layers = cfg.graph_layers;
  gc.dropout_rate = cfg.dropout_rate;
  drug_ = std::make_unique<GraphNet>(store_, gc, init);

  ProteinEncoderConfig pc;
  pc.dim = cfg.protein_dim;
  pc.channels = cfg.protein_channels;
  pc.dropout_rate = cfg.dropout_rate;
  protein_ = std::make_unique<ProteinEncoder>(store_, pc, init);

  ClassifierConfig cc;
  cc.in_dim = std::size_t(cfg.protein_dim) + std::size_t(drug_->output_dim());
  cc.hidden = std::size_t(cfg.head_hidden);
  cc.dropout_rate = cfg.dropout_rate;
  head_ = std::make_unique<ClassifierHead>(store_, cc, init);
}

ad::Var DpiModel::forward(ad::Tape& t,
                          const std::vector<const chem::MolGraph*>& graphs,
                          const Tensor& proteins, ad::DropoutMask::Mode mode,
                          Rng* rng) const {
  if (graphs.empty()) throw DataError("empty batch");
  if (proteins.shape.size() != 2 || proteins.shape[0] != graphs.size() ||
      proteins.shape[1] != std::size_t(cfg_.protein_dim))
    throw ShapeError("expected " + std::to_string(graphs.size()) + " x " +
                     std::to_string(cfg_.protein_dim) + " protein block, got " +
                     proteins.shape_str());

  std::vector<ad::Var> joints;
  joints.reserve(graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    Tensor row = Tensor::zeros({1, proteins.shape[1]});
    for (std::size_t c = 0; c < proteins.shape[1]; ++c)
      row.data[c] = proteins.at(i, c);
    ad::Var x_p = protein_->encode(t, t.input(row), mode, rng);
    ad::Var x_d = drug_->encode(t, *graphs[i], mode, rng);
    joints.push_back(concat_features(t, x_p, x_d));
  }
  ad::Var batch = joints.size() == 1 ? joints[0] : t.stack_rows(joints);
  return head_->predict(t, batch, mode, rng);
}

Tensor DpiModel::predict_one(const chem::MolGraph& g, const Tensor& protein,
                             ad::DropoutMask::Mode mode, Rng* rng) const {
  Tensor row = protein;
  if (row.shape.size() == 1) row.shape = {1, row.data.size()};
  ad::Tape t;
  ad::Var p = forward(t, {&g}, row, mode, rng);
  Tensor out = t.value(p);
  out.shape = {2};
  return out;
}

void DpiModel::set_dropout_rate(double rate) {
  drug_->set_dropout_rate(rate);
  protein_->set_dropout_rate(rate);
  head_->set_dropout_rate(rate);
  cfg_.dropout_rate = rate;
}

namespace {

constexpr char kMagic[8] = {'D', 'P', 'I', 'C', 'K', 'P', 'T', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double d) {
  put_u64(out, std::bit_cast<std::uint64_t>(d));
}

void put_str(std::ostream& out, const std::string& s) {
  put_u64(out, s.size());
  out.write(s.data(), std::streamsize(s.size()));
}

std::uint64_t get_u64(std::istream& in, const std::string& path) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8))
    throw DataError(path + ": truncated checkpoint");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double get_f64(std::istream& in, const std::string& path) {
  return std::bit_cast<double>(get_u64(in, path));
}

std::string get_str(std::istream& in, const std::string& path) {
  std::uint64_t n = get_u64(in, path);
  if (n > (1u << 20)) throw DataError(path + ": implausible string length");
  std::string s(n, '\0');
  if (n && !in.read(s.data(), std::streamsize(n)))
    throw DataError(path + ": truncated checkpoint");
  return s;
}

}  // namespace

void save_checkpoint(const DpiModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out.write(kMagic, 8);

  const ModelConfig& c = model.config();
  put_u64(out, std::uint64_t(c.graph_hidden));
  put_u64(out, std::uint64_t(c.graph_layers));
  put_u64(out, std::uint64_t(c.protein_dim));
  put_u64(out, std::uint64_t(c.protein_channels));
  put_u64(out, std::uint64_t(c.head_hidden));
  put_f64(out, c.dropout_rate);
  put_u64(out, c.init_seed);

  const ad::ParamStore& store = model.params();
  put_u64(out, store.count());
  for (std::size_t i = 0; i < store.count(); ++i) {
    const ad::Parameter& p = store.at(i);
    put_str(out, p.name);
    out.put(p.is_weight ? 1 : 0);
    put_u64(out, p.value.shape.size());
    for (std::size_t d : p.value.shape) put_u64(out, d);
    for (double v : p.value.data) put_f64(out, v);
  }
  if (!out) throw DataError("write failure on " + path);
}

std::unique_ptr<DpiModel> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw DataError(path + ": not a checkpoint file");

  ModelConfig c;
  c.graph_hidden = int(get_u64(in, path));
  c.graph_layers = int(get_u64(in, path));
  c.protein_dim = int(get_u64(in, path));
  c.protein_channels = int(get_u64(in, path));
  c.head_hidden = int(get_u64(in, path));
  c.dropout_rate = get_f64(in, path);
  c.init_seed = get_u64(in, path);

  auto model = std::make_unique<DpiModel>(c);
  ad::ParamStore& store = model->params();

  std::uint64_t n = get_u64(in, path);
  if (n != store.count())
    throw DataError(path + ": checkpoint has " + std::to_string(n) +
                    " tensors, model built from its config has " +
                    std::to_string(store.count()));
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string name = get_str(in, path);
    int flag = in.get();
    if (flag != 0 && flag != 1) throw DataError(path + ": truncated checkpoint");
    ad::Parameter* p = store.find(name);
    if (!p) throw DataError(path + ": unknown tensor '" + name + "'");
    std::uint64_t rank = get_u64(in, path);
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = get_u64(in, path);
    if (shape != p->value.shape)
      throw DataError(path + ": shape mismatch for '" + name + "'");
    if ((flag == 1) != p->is_weight)
      throw DataError(path + ": weight flag mismatch for '" + name + "'");
    for (double& v : p->value.data) v = get_f64(in, path);
  }
  in.peek();
  if (!in.eof()) throw DataError(path + ": trailing bytes after checkpoint");
  return model;
}

}  // namespace dpi
