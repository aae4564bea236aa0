#include "dpi/graphnet.hpp"

#include "dpi/errors.hpp"
#include "dpi/init.hpp"

namespace dpi {

using ad::DropoutMask;
using ad::Tape;
using ad::Var;

GraphNet::GraphNet(ad::ParamStore& store, const GraphNetConfig& cfg,
                   Rng& init_rng, const std::string& prefix)
    : cfg_(cfg) {
  if (cfg.layers < 1 || cfg.hidden < 1)
    throw ConfigError("graph encoder needs at least one layer and one unit");
  if (cfg.dropout_rate < 0.0 || cfg.dropout_rate >= 1.0)
    throw ConfigError("dropout rate must lie in [0, 1)");
  const std::size_t h = std::size_t(cfg.hidden);
  for (int l = 0; l < cfg.layers; ++l) {
    const std::size_t dv = l == 0 ? std::size_t(cfg.node_dim) : h;
    const std::size_t de = l == 0 ? std::size_t(cfg.edge_dim) : h;
    const std::string tag = prefix + ".layer" + std::to_string(l);
    Layer layer;
    layer.W_e = &store.add(tag + ".W_e",
                           kaiming_uniform({de + 2 * dv, h}, de + 2 * dv, init_rng),
                           true);
    layer.b_e = &store.add(tag + ".b_e", Tensor::zeros({h}), false);
    layer.W_v = &store.add(tag + ".W_v",
                           kaiming_uniform({dv + h, h}, dv + h, init_rng), true);
    layer.b_v = &store.add(tag + ".b_v", Tensor::zeros({h}), false);
    layers_.push_back(layer);
  }
}

Var GraphNet::edge_update(Tape& t, int layer, Var nodes, Var edges,
                          const std::vector<std::size_t>& src,
                          const std::vector<std::size_t>& dst) const {
  const Layer& L = layers_.at(std::size_t(layer));
  Var vi = t.gather_rows(nodes, src);
  Var vj = t.gather_rows(nodes, dst);
  Var packed = t.concat_cols({edges, vi, vj});
  return t.relu(t.add_row_bias(t.matmul(packed, t.param(*L.W_e)), t.param(*L.b_e)));
}

Var GraphNet::node_update(Tape& t, int layer, Var nodes, Var new_edges,
                          const std::vector<std::size_t>& src,
                          std::size_t n_nodes) const {
  const Layer& L = layers_.at(std::size_t(layer));
  Var messages = new_edges.valid()
                     ? t.scatter_sum_rows(new_edges, src, n_nodes)
                     : t.input(Tensor::zeros({n_nodes, std::size_t(cfg_.hidden)}));
  Var packed = t.concat_cols({nodes, messages});
  return t.relu(t.add_row_bias(t.matmul(packed, t.param(*L.W_v)), t.param(*L.b_v)));
}

Var GraphNet::readout(Tape& t, Var nodes, Var edges,
                      const std::vector<std::size_t>& src,
                      std::size_t n_nodes) const {
  if (n_nodes == 0) throw DataError("cannot read out an empty graph");
  Var edge_mean;
  if (edges.valid()) {
    std::vector<double> inv_outdeg(n_nodes, 0.0);
    for (std::size_t s : src) inv_outdeg[s] += 1.0;
    for (double& d : inv_outdeg) d = d > 0.0 ? 1.0 / d : 0.0;
    edge_mean = t.scale_rows(t.scatter_sum_rows(edges, src, n_nodes), inv_outdeg);
  } else {
    edge_mean = t.input(Tensor::zeros({n_nodes, t.value(nodes).cols()}));
  }
  return t.mean_rows(t.concat_cols({nodes, edge_mean}));
}

std::pair<Var, Var> GraphNet::forward_states(Tape& t, const chem::MolGraph& g,
                                             DropoutMask::Mode mode,
                                             Rng* rng) const {
  if (g.n == 0) throw DataError("cannot encode an empty graph");
  if (mode != DropoutMask::Mode::off && rng == nullptr)
    throw ConfigError("stochastic dropout mode needs a random stream");
  const std::size_t n = std::size_t(g.n);
  std::vector<std::size_t> src, dst;
  src.reserve(g.edges.size());
  dst.reserve(g.edges.size());
  for (const auto& [i, j] : g.edges) {
    src.push_back(std::size_t(i));
    dst.push_back(std::size_t(j));
  }

  Var nodes = t.input(g.node_feats);
  Var edges;  // invalid when the molecule has no bonds
  if (!g.edges.empty()) edges = t.input(g.edge_feats);

  for (int l = 0; l < cfg_.layers; ++l) {
    if (edges.valid()) edges = edge_update(t, l, nodes, edges, src, dst);
    nodes = node_update(t, l, nodes, edges, src, n);
    if (mode != DropoutMask::Mode::off) {
      DropoutMask m =
          DropoutMask::make(t.value(nodes).shape, cfg_.dropout_rate, mode, *rng);
      nodes = t.dropout(nodes, m);
    }
  }
  return {nodes, edges};
}

Var GraphNet::encode(Tape& t, const chem::MolGraph& g, DropoutMask::Mode mode,
                     Rng* rng) const {
  auto [nodes, edges] = forward_states(t, g, mode, rng);
  std::vector<std::size_t> src;
  src.reserve(g.edges.size());
  for (const auto& [i, j] : g.edges) src.push_back(std::size_t(i));
  return readout(t, nodes, edges, src, std::size_t(g.n));
}


void GraphNet::set_dropout_rate(double rate) {
  if (rate < 0.0 || rate >= 1.0)
    throw ConfigError("dropout rate must lie in [0, 1)");
  cfg_.dropout_rate = rate;
}

}  // namespace dpi
