#include "dpi/featurize.hpp"

#include <algorithm>
#include <string>

#include "dpi/errors.hpp"

namespace dpi::chem {

namespace {

const std::vector<std::string> kElementOrder = {"B", "C", "N",  "O", "F",
                                                "P", "S", "Cl", "Br", "I"};

bool has_ring_of(const std::vector<int>& sizes, int size) {
  return std::find(sizes.begin(), sizes.end(), size) != sizes.end();
}

void node_row(const Molecule& m, int i, double* out) {
  const Atom& a = m.atoms[std::size_t(i)];
  if (a.degree > 5)
    throw DataError("atom " + std::to_string(i) + " has degree " +
                    std::to_string(a.degree) + ", feature vocabulary stops at 5");
  auto it = std::find(kElementOrder.begin(), kElementOrder.end(), a.element);
  int elem = it == kElementOrder.end() ? 10 : int(it - kElementOrder.begin());
  out[elem] = 1.0;
  out[11 + a.degree] = 1.0;
  if (a.formal_charge >= -2 && a.formal_charge <= 2)
    out[17 + a.formal_charge + 2] = 1.0;
  int h = m.total_h(i);
  if (h <= 4) out[22 + h] = 1.0;
  bool has_double = false;
  bool has_triple = false;
  for (const Bond& b : m.bonds) {
    if (b.a != i && b.b != i) continue;
    has_double = has_double || b.order == BondOrder::double_bond;
    has_triple = has_triple || b.order == BondOrder::triple_bond;
  }
  if (a.aromatic || has_double) out[27 + 1] = 1.0;       // sp2
  else if (has_triple) out[27 + 0] = 1.0;                // sp
  else out[27 + 2] = 1.0;                                // sp3
  if (a.aromatic) out[31] = 1.0;
  if (a.in_ring) out[32] = 1.0;
  if (has_ring_of(a.ring_sizes, 3)) out[33] = 1.0;
  if (has_ring_of(a.ring_sizes, 4)) out[34] = 1.0;
  if (has_ring_of(a.ring_sizes, 5)) out[35] = 1.0;
}

void edge_row(const Bond& b, double* out) {
  switch (b.order) {
    case BondOrder::single: out[0] = 1.0; break;
    case BondOrder::double_bond: out[1] = 1.0; break;
    case BondOrder::triple_bond: out[2] = 1.0; break;
    case BondOrder::aromatic: out[3] = 1.0; break;
  }
  if (b.conjugated) out[4] = 1.0;
  if (b.in_ring) out[5] = 1.0;
  if (has_ring_of(b.ring_sizes, 5)) out[6] = 1.0;
  if (has_ring_of(b.ring_sizes, 6)) out[7] = 1.0;
}

}  // namespace

std::vector<double> MolGraph::edge_vec(int i, int j) const {
  auto it = edge_index.find({i, j});
  if (it == edge_index.end())
    throw DataError("no edge between atoms " + std::to_string(i) + " and " +
                    std::to_string(j));
  const double* row = &edge_feats.data[std::size_t(it->second) * kEdgeFeatDim];
  return std::vector<double>(row, row + kEdgeFeatDim);
}

MolGraph featurize(const Molecule& m) {
  MolGraph g;
  g.n = int(m.atoms.size());
  g.node_feats = Tensor::zeros({m.atoms.size(), std::size_t(kNodeFeatDim)});
  g.neighbors.resize(m.atoms.size());
  for (int i = 0; i < g.n; ++i)
    node_row(m, i, &g.node_feats.data[std::size_t(i) * kNodeFeatDim]);

  g.edge_feats =
      Tensor::zeros({m.bonds.size() * 2, std::size_t(kEdgeFeatDim)});
  for (std::size_t k = 0; k < m.bonds.size(); ++k) {
    const Bond& b = m.bonds[k];
    std::vector<double> row(kEdgeFeatDim, 0.0);
    edge_row(b, row.data());
    for (int dir = 0; dir < 2; ++dir) {
      int src = dir == 0 ? b.a : b.b;
      int dst = dir == 0 ? b.b : b.a;
      int idx = int(g.edges.size());
      g.edges.emplace_back(src, dst);
      std::copy(row.begin(), row.end(),
                g.edge_feats.data.begin() + idx * kEdgeFeatDim);
      g.edge_index[{src, dst}] = idx;
      g.neighbors[std::size_t(src)].push_back(dst);
    }
  }
  return g;
}

}  // namespace dpi::chem
