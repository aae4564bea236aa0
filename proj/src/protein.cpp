#include "dpi/protein.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dpi/errors.hpp"
#include "dpi/init.hpp"

namespace dpi {

using ad::DropoutMask;
using ad::Tape;
using ad::Var;

Tensor pool(const ProteinEmbedding& e) {
  if (e.is_pooled()) return e.X;
  const std::size_t L = e.X.rows(), d = e.X.cols();
  if (L == 0) throw DataError("protein embedding has no residues");
  Tensor out = Tensor::zeros({d});
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t c = 0; c < d; ++c) out.data[c] += e.X.at(i, c);
  for (double& x : out.data) x /= double(L);
  return out;
}

ProteinEncoder::ProteinEncoder(ad::ParamStore& store,
                               const ProteinEncoderConfig& cfg, Rng& init_rng,
                               const std::string& prefix)
    : cfg_(cfg) {
  if (cfg.dim < 1 || cfg.channels < 1) throw ConfigError("bad encoder dims");
  if (cfg.kernel < 1 || cfg.kernel % 2 == 0)
    throw ConfigError("conv kernel must be odd");
  if (cfg.dropout_rate < 0.0 || cfg.dropout_rate >= 1.0)
    throw ConfigError("dropout rate must lie in [0, 1)");
  const std::size_t c = std::size_t(cfg.channels);
  const std::size_t k = std::size_t(cfg.kernel);
  const std::size_t chans[4] = {1, c, c, 1};
  for (int l = 0; l < 3; ++l) {
    const std::string tag = prefix + ".conv" + std::to_string(l);
    const std::size_t cin = chans[l], cout = chans[l + 1];
    // Near-identity start: center taps average the input channels, plus a
    // damped random component for symmetry breaking. Embeddings are
    // non-negative, so the passthrough survives the ReLUs and the stack
    // begins close to the identity instead of attenuating its input.
    Tensor kernel = kaiming_uniform({cout, cin, k}, cin * k, init_rng);
    for (double& x : kernel.data) x *= 0.25;
    for (std::size_t o = 0; o < cout; ++o)
      for (std::size_t i = 0; i < cin; ++i)
        kernel.data[(o * cin + i) * k + k / 2] += 1.0 / double(cin);
    Layer layer;
    layer.kernel = &store.add(tag + ".kernel", std::move(kernel), true);
    layer.bias = &store.add(tag + ".bias", Tensor::zeros({cout}), false);
    layers_.push_back(layer);
  }
}

Var ProteinEncoder::encode(Tape& t, Var x, DropoutMask::Mode mode,
                           Rng* rng) const {
  if (mode != DropoutMask::Mode::off && rng == nullptr)
    throw ConfigError("stochastic dropout mode needs a random stream");
  const Tensor& in = t.value(x);
  if (in.rows() != 1 || in.cols() != std::size_t(cfg_.dim))
    throw ConfigError("protein encoder expects a 1 x " +
                      std::to_string(cfg_.dim) + " row, got " + in.shape_str());
  Var h = x;  // 1 channel x d signal
  for (const Layer& L : layers_) {
    h = t.relu(t.add_channel_bias(t.conv1d(h, t.param(*L.kernel)),
                                  t.param(*L.bias)));
    if (mode != DropoutMask::Mode::off) {
      DropoutMask m =
          DropoutMask::make(t.value(h).shape, cfg_.dropout_rate, mode, *rng);
      h = t.dropout(h, m);
    }
  }
  return h;
}

std::map<std::string, ProteinEmbedding> load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw DataError("cannot open embedding file " + path);
  std::map<std::string, ProteinEmbedding> out;
  std::string line;
  if (!std::getline(in, line)) return out;  // zero-byte file
  if (line.rfind("#dim=", 0) != 0)
    throw DataError(path + ":1: expected a #dim= header");
  std::size_t d = 0;
  try {
    d = std::size_t(std::stoul(line.substr(5)));
  } catch (const std::exception&) {
    throw DataError(path + ":1: bad dimension in header");
  }
  if (d == 0) throw DataError(path + ":1: dimension must be positive");

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string id;
    if (!std::getline(row, id, '\t') || id.empty())
      throw DataError(path + ":" + std::to_string(lineno) + ": missing id");
    if (out.count(id))
      throw DataError(path + ":" + std::to_string(lineno) + ": duplicate id " + id);
    ProteinEmbedding e;
    e.id = id;
    e.X = Tensor::zeros({d});
    std::string field;
    std::size_t got = 0;
    while (std::getline(row, field, '\t')) {
      if (got >= d)
        throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(d) + " values, got more");
      try {
        std::size_t used = 0;
        e.X.data[got] = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw DataError(path + ":" + std::to_string(lineno) + ": bad number '" +
                        field + "'");
      }
      ++got;
    }
    if (got != d)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(d) + " values, got " + std::to_string(got));
    if (!e.X.all_finite())
      throw DataError(path + ":" + std::to_string(lineno) + ": non-finite value");
    out.emplace(id, std::move(e));
  }
  return out;
}

namespace {

int residue_code(char c) {
  static const std::string canon = "ACDEFGHIKLMNPQRSTVWY";
  std::size_t p = canon.find(char(std::toupper(static_cast<unsigned char>(c))));
  return p == std::string::npos ? 20 : int(p);  // shared bucket for the rest
}

}  // namespace

ProteinEmbedding stub_embed(const std::string& sequence, const StubEmbedder& cfg) {
  if (sequence.empty()) throw DataError("cannot embed an empty sequence");
  if (cfg.dim < 1) throw ConfigError("embedder width must be positive");
  const std::size_t k = std::min<std::size_t>(3, sequence.size());
  std::vector<std::uint64_t> counts(std::size_t(cfg.dim), 0);
  for (std::size_t i = 0; i + k <= sequence.size(); ++i) {
    std::uint64_t code = 0;
    for (std::size_t j = 0; j < k; ++j)
      code = code * 21 + std::uint64_t(residue_code(sequence[i + j]));
    counts[Rng::derive(cfg.seed, code) % std::uint64_t(cfg.dim)] += 1;
  }
  ProteinEmbedding e;
  e.X = Tensor::zeros({std::size_t(cfg.dim)});
  double norm2 = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    e.X.data[i] = double(counts[i]);
    norm2 += e.X.data[i] * e.X.data[i];
  }
  const double norm = std::sqrt(norm2);
  for (double& x : e.X.data) x /= norm;
  return e;
}


void ProteinEncoder::set_dropout_rate(double rate) {
  if (rate < 0.0 || rate >= 1.0)
    throw ConfigError("dropout rate must lie in [0, 1)");
  cfg_.dropout_rate = rate;
}

}  // namespace dpi
