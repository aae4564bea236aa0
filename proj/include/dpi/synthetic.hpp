#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dpi {

// Planted-rule benchmark: two drug scaffold families (aromatic vs
// aliphatic) and two protein sequence clusters over disjoint residue
// alphabets. A pair interacts iff the family index matches the cluster
// index; each label is then flipped with probability flip_prob.
struct SyntheticConfig {
  std::size_t pairs = 2000;
  double flip_prob = 0.0;
  std::uint64_t seed = 7;
  std::size_t drugs_per_class = 40;
  std::size_t proteins_per_cluster = 25;
};

struct SyntheticRow {
  std::string smiles;
  std::string protein;
  int label = 0;
};

std::vector<SyntheticRow> gen_synthetic_rows(const SyntheticConfig& cfg);

// Writes the rows as an ingestable TSV (header smiles/protein/label).
void gen_synthetic(const SyntheticConfig& cfg, const std::string& out_path);

}  // namespace dpi
