#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "dpi/errors.hpp"
#include "dpi/featurize.hpp"
#include "dpi/smiles.hpp"

using dpi::chem::featurize;
using dpi::chem::kEdgeFeatDim;
using dpi::chem::kNodeFeatDim;
using dpi::chem::MolGraph;
using dpi::chem::parse_smiles;

namespace {

std::vector<double> node_row(const MolGraph& g, int i) {
  const double* row = &g.node_feats.data[std::size_t(i) * kNodeFeatDim];
  return std::vector<double>(row, row + kNodeFeatDim);
}

double block_sum(const std::vector<double>& v, int from, int len) {
  double s = 0;
  for (int i = from; i < from + len; ++i) s += v[std::size_t(i)];
  return s;
}

std::vector<std::string> corpus_smiles() {
  std::ifstream in(std::string(DPI_TEST_DATA_DIR) + "/smiles_corpus.tsv");
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  std::vector<std::string> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(line.substr(0, line.find('\t')));
  }
  return out;
}

}  // namespace

TEST_CASE("methane node vector") {
  MolGraph g = featurize(parse_smiles("C"));
  REQUIRE(g.n == 1);
  CHECK(g.edges.empty());
  CHECK(g.neighbors[0].empty());
  std::vector<double> want(kNodeFeatDim, 0.0);
  want[1] = 1.0;       // element C
  want[11 + 0] = 1.0;  // degree 0
  want[17 + 2] = 1.0;  // charge 0
  want[22 + 4] = 1.0;  // four hydrogens
  want[27 + 2] = 1.0;  // sp3
  CHECK(node_row(g, 0) == want);
}

TEST_CASE("ethane symmetry") {
  MolGraph g = featurize(parse_smiles("CC"));
  REQUIRE(g.n == 2);
  CHECK(node_row(g, 0) == node_row(g, 1));
  REQUIRE(g.edges.size() == 2);
  auto fwd = g.edge_vec(0, 1);
  auto rev = g.edge_vec(1, 0);
  CHECK(fwd == rev);
  CHECK(fwd[0] == 1.0);  // single bond
  CHECK(block_sum(fwd, 0, 4) == 1.0);
  CHECK(fwd[4] == 0.0);
  CHECK(fwd[5] == 0.0);
}

TEST_CASE("benzene nodes and edges are uniform") {
  MolGraph g = featurize(parse_smiles("c1ccccc1"));
  REQUIRE(g.n == 6);
  REQUIRE(g.edges.size() == 12);
  auto first = node_row(g, 0);
  CHECK(first[1] == 1.0);       // C
  CHECK(first[11 + 2] == 1.0);  // degree 2
  CHECK(first[22 + 1] == 1.0);  // one hydrogen
  CHECK(first[27 + 1] == 1.0);  // sp2
  CHECK(first[31] == 1.0);      // aromatic
  CHECK(first[32] == 1.0);      // in ring
  CHECK(first[33] == 0.0);
  CHECK(first[34] == 0.0);
  CHECK(first[35] == 0.0);
  for (int i = 1; i < 6; ++i) CHECK(node_row(g, i) == first);
  auto e0 = g.edge_vec(g.edges[0].first, g.edges[0].second);
  CHECK(e0[3] == 1.0);  // aromatic bond
  CHECK(e0[4] == 1.0);  // conjugated
  CHECK(e0[5] == 1.0);  // in ring
  CHECK(e0[6] == 0.0);  // not in a 5-ring
  CHECK(e0[7] == 1.0);  // in a 6-ring
  for (const auto& [i, j] : g.edges) CHECK(g.edge_vec(i, j) == e0);
}

TEST_CASE("cyclopentane ring-size flags") {
  MolGraph g = featurize(parse_smiles("C1CCCC1"));
  auto row = node_row(g, 0);
  CHECK(row[32] == 1.0);
  CHECK(row[33] == 0.0);
  CHECK(row[34] == 0.0);
  CHECK(row[35] == 1.0);  // 5-ring through the atom
  auto e = g.edge_vec(0, 1);
  CHECK(e[5] == 1.0);
  CHECK(e[6] == 1.0);  // 5-ring through the bond
  CHECK(e[7] == 0.0);
}

TEST_CASE("hybridization chain: triple then sp, allene-style double wins") {
  MolGraph nitrile = featurize(parse_smiles("CC#N"));
  CHECK(node_row(nitrile, 1)[27 + 0] == 1.0);  // sp carbon
  CHECK(node_row(nitrile, 2)[27 + 0] == 1.0);  // sp nitrogen
  CHECK(node_row(nitrile, 0)[27 + 2] == 1.0);  // methyl sp3

  MolGraph ester = featurize(parse_smiles("CC(=O)OC"));
  CHECK(node_row(ester, 1)[27 + 1] == 1.0);  // carbonyl carbon sp2
  CHECK(node_row(ester, 3)[27 + 2] == 1.0);  // ether oxygen sp3
}

TEST_CASE("charge and hydrogen buckets") {
  MolGraph ammonium = featurize(parse_smiles("[NH4+]"));
  auto row = node_row(ammonium, 0);
  CHECK(row[17 + 3] == 1.0);  // +1
  CHECK(row[22 + 4] == 1.0);  // 4 hydrogens

  MolGraph phenolate = featurize(parse_smiles("[O-]c1ccccc1"));
  CHECK(node_row(phenolate, 0)[17 + 1] == 1.0);  // -1

  // out-of-vocabulary charge leaves the block all zero
  MolGraph cation = featurize(parse_smiles("[N+3]"));
  CHECK(block_sum(node_row(cation, 0), 17, 5) == 0.0);

  // out-of-vocabulary hydrogen count leaves the block all zero
  MolGraph hyper = featurize(parse_smiles("[PH5]"));
  CHECK(block_sum(node_row(hyper, 0), 22, 5) == 0.0);
}

TEST_CASE("degree above five is rejected") {
  CHECK_THROWS_AS(featurize(parse_smiles("C(F)(F)(F)(F)(F)F")),
                  dpi::DataError);
}

TEST_CASE("permutation equivariance under a known relabeling") {
  MolGraph a = featurize(parse_smiles("Cc1ccccc1Cl"));
  MolGraph b = featurize(parse_smiles("Clc1ccccc1C"));
  const std::map<int, int> pi = {{0, 7}, {1, 6}, {2, 5}, {3, 4},
                                 {4, 3}, {5, 2}, {6, 1}, {7, 0}};
  REQUIRE(a.n == b.n);
  for (const auto& [i, j] : pi) CHECK(node_row(a, i) == node_row(b, j));
  for (const auto& [i, j] : a.edges)
    CHECK(a.edge_vec(i, j) == b.edge_vec(pi.at(i), pi.at(j)));
}

TEST_CASE("one-hot block structure holds across the corpus") {
  for (const std::string& s : corpus_smiles()) {
    CAPTURE(s);
    MolGraph g = featurize(parse_smiles(s));
    REQUIRE(g.node_feats.all_finite());
    REQUIRE(g.edge_feats.all_finite());
    for (int i = 0; i < g.n; ++i) {
      auto row = node_row(g, i);
      CHECK(block_sum(row, 0, 11) == 1.0);  // element block always hits
      CHECK(block_sum(row, 11, 6) == 1.0);  // degree 0-5 enforced
      CHECK(block_sum(row, 17, 5) <= 1.0);
      CHECK(block_sum(row, 22, 5) <= 1.0);
      CHECK(block_sum(row, 27, 4) == 1.0);
    }
    for (const auto& [i, j] : g.edges) {
      auto e = g.edge_vec(i, j);
      CHECK(block_sum(e, 0, 4) == 1.0);
      CHECK(e == g.edge_vec(j, i));
    }
    // neighbors mirror the directed edge keys
    for (int i = 0; i < g.n; ++i)
      for (int j : g.neighbors[std::size_t(i)])
        CHECK(g.edge_index.count({i, j}) == 1);
    CHECK(g.edges.size() == g.edge_index.size());
  }
}

TEST_CASE("featurize is deterministic") {
  MolGraph a = featurize(parse_smiles("CC(=O)Oc1ccccc1C(=O)O"));
  MolGraph b = featurize(parse_smiles("CC(=O)Oc1ccccc1C(=O)O"));
  CHECK(a.node_feats.data == b.node_feats.data);
  CHECK(a.edge_feats.data == b.edge_feats.data);
  CHECK(a.edges == b.edges);
}
