#pragma once

#include <string>
#include <vector>

#include "dpi/autodiff.hpp"
#include "dpi/featurize.hpp"
#include "dpi/rng.hpp"

namespace dpi {

struct GraphNetConfig {
  int node_dim = chem::kNodeFeatDim;
  int edge_dim = chem::kEdgeFeatDim;
  int hidden = 256;
  int layers = 3;
  double dropout_rate = 0.1;
};

// Message-passing drug encoder. Each layer refreshes every directed edge
// from a snapshot of the previous states,
//   e'_ij = ReLU[(e_ij | v_i | v_j) W_e + b_e],
// then every node from the refreshed edges,
//   v'_i = ReLU[(v_i | sum_{j in N(i)} e'_ij) W_v + b_v],
// with dropout on the node states. The readout averages (v_i | mean of
// outgoing e_ij) over atoms, giving a 2*hidden drug vector.
class GraphNet {
 public:
  GraphNet(ad::ParamStore& store, const GraphNetConfig& cfg, Rng& init_rng,
           const std::string& prefix = "graphnet");

  ad::Var edge_update(ad::Tape& t, int layer, ad::Var nodes, ad::Var edges,
                      const std::vector<std::size_t>& src,
                      const std::vector<std::size_t>& dst) const;
  ad::Var node_update(ad::Tape& t, int layer, ad::Var nodes, ad::Var new_edges,
                      const std::vector<std::size_t>& src,
                      std::size_t n_nodes) const;
  ad::Var readout(ad::Tape& t, ad::Var nodes, ad::Var edges,
                  const std::vector<std::size_t>& src, std::size_t n_nodes) const;

  // Full stack: (edge_update, node_update, dropout) x layers, then readout.
  // rng drives dropout masks and may be null when mode is off.
  ad::Var encode(ad::Tape& t, const chem::MolGraph& g, ad::DropoutMask::Mode mode,
                 Rng* rng) const;

  // Final (nodes, edges) states before readout; edges is invalid() for a
  // bond-free molecule.
  std::pair<ad::Var, ad::Var> forward_states(ad::Tape& t, const chem::MolGraph& g,
                                             ad::DropoutMask::Mode mode,
                                             Rng* rng) const;

  const GraphNetConfig& config() const { return cfg_; }
  int output_dim() const { return 2 * cfg_.hidden; }
  void set_dropout_rate(double rate);

  struct Layer {
    ad::Parameter* W_e;
    ad::Parameter* b_e;
    ad::Parameter* W_v;
    ad::Parameter* b_v;
  };
  const std::vector<Layer>& layer_params() const { return layers_; }

 private:
  GraphNetConfig cfg_;
  std::vector<Layer> layers_;
};

}  // namespace dpi
