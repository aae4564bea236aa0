#pragma once

#include <map>
#include <utility>
#include <vector>

#include "dpi/smiles.hpp"
#include "dpi/tensor.hpp"

namespace dpi::chem {

inline constexpr int kNodeFeatDim = 36;
inline constexpr int kEdgeFeatDim = 8;

// Numeric molecular graph consumed by the graph encoder. Every bond appears
// as two directed edges carrying identical initial feature rows.
struct MolGraph {
  int n = 0;
  Tensor node_feats;                              // n x 36
  std::vector<std::pair<int, int>> edges;         // directed (i, j)
  Tensor edge_feats;                              // edges.size() x 8
  std::vector<std::vector<int>> neighbors;        // neighbor atom indices
  std::map<std::pair<int, int>, int> edge_index;  // (i, j) -> edge row

  std::vector<double> edge_vec(int i, int j) const;
};

// Node layout: element one-hot {B,C,N,O,F,P,S,Cl,Br,I,other} (11) | degree
// 0-5 (6) | formal charge {-2..+2} (5) | total H 0-4 (5) | hybridization
// {sp,sp2,sp3,other} (4) | aromatic (1) | in-ring (1) | ring-size 3/4/5 (3).
// Edge layout: order one-hot {single,double,triple,aromatic} (4) |
// conjugated (1) | in-ring (1) | ring-size 5/6 (2). Charges or H counts
// outside the vocabulary leave their block all zero.
MolGraph featurize(const Molecule& m);

}  // namespace dpi::chem
