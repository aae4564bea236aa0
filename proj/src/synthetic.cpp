#include "dpi/synthetic.hpp"

#include <fstream>
#include <set>

#include "dpi/errors.hpp"
#include "dpi/rng.hpp"
#include "dpi/smiles.hpp"

namespace dpi {

namespace {

// Substituents valid both as a prefix (Xcore) and inside parentheses.
const std::vector<std::string> kGroups = {"C",  "CC", "O",  "N",
                                          "Cl", "F",  "CO", "CN"};

std::string aromatic_drug(Rng& rng) {
  switch (rng.index(4)) {
    case 0:
      return kGroups[rng.index(kGroups.size())] + "c1ccccc1";
    case 1:
      return kGroups[rng.index(kGroups.size())] + "c1ccc(" +
             kGroups[rng.index(kGroups.size())] + ")cc1";
    case 2:
      return kGroups[rng.index(kGroups.size())] + "c1cccc(" +
             kGroups[rng.index(kGroups.size())] + ")c1";
    default:
      return kGroups[rng.index(kGroups.size())] + "c1ccncc1";
  }
}

std::string aliphatic_drug(Rng& rng) {
  switch (rng.index(4)) {
    case 0:
      return kGroups[rng.index(kGroups.size())] + "C1CCCCC1";
    case 1:
      return kGroups[rng.index(kGroups.size())] + "C1CCC(" +
             kGroups[rng.index(kGroups.size())] + ")CC1";
    case 2:
      return "CC(" + kGroups[rng.index(kGroups.size())] + ")CC" +
             kGroups[rng.index(kGroups.size())];
    default:
      return kGroups[rng.index(kGroups.size())] + "C1CCCC1";
  }
}

std::vector<std::string> make_drugs(std::size_t count, int family, Rng& rng) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > 100 * count)
      throw ConfigError("cannot generate " + std::to_string(count) +
                        " distinct scaffolds; lower drugs_per_class");
    std::string s = family == 0 ? aromatic_drug(rng) : aliphatic_drug(rng);
    if (!seen.insert(s).second) continue;
    chem::parse_smiles(s);  // generator bug guard: every drug must parse
    out.push_back(s);
  }
  return out;
}

std::vector<std::string> make_proteins(std::size_t count,
                                       const std::string& alphabet, Rng& rng) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < count) {
    // One in five sequences is short. A handful of 3-mers is weak cluster
    // evidence, so the pools carry a difficulty gradient instead of being
    // uniformly separable.
    const std::size_t len =
        rng.index(5) == 0 ? 4 + rng.index(5) : 30 + rng.index(31);
    std::string seq;
    seq.reserve(len);
    for (std::size_t i = 0; i < len; ++i)
      seq.push_back(alphabet[rng.index(alphabet.size())]);
    if (seen.insert(seq).second) out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace

std::vector<SyntheticRow> gen_synthetic_rows(const SyntheticConfig& cfg) {
  if (cfg.pairs == 0) throw ConfigError("pairs must be positive");
  if (cfg.flip_prob < 0.0 || cfg.flip_prob > 1.0)
    throw ConfigError("flip probability must lie in [0, 1]");
  if (cfg.drugs_per_class == 0 || cfg.proteins_per_cluster == 0)
    throw ConfigError("entity pools must be non-empty");

  Rng drug_rng(Rng::derive(cfg.seed, 1));
  Rng prot_rng(Rng::derive(cfg.seed, 2));
  Rng pair_rng(Rng::derive(cfg.seed, 3));

  const std::vector<std::vector<std::string>> drugs = {
      make_drugs(cfg.drugs_per_class, 0, drug_rng),
      make_drugs(cfg.drugs_per_class, 1, drug_rng)};
  const std::vector<std::vector<std::string>> proteins = {
      make_proteins(cfg.proteins_per_cluster, "ACDEFGHI", prot_rng),
      make_proteins(cfg.proteins_per_cluster, "KLMNPQRS", prot_rng)};

  std::vector<SyntheticRow> rows;
  rows.reserve(cfg.pairs);
  for (std::size_t i = 0; i < cfg.pairs; ++i) {
    const std::size_t family = pair_rng.index(2);
    const std::size_t cluster = pair_rng.index(2);
    SyntheticRow row;
    row.smiles = drugs[family][pair_rng.index(cfg.drugs_per_class)];
    row.protein = proteins[cluster][pair_rng.index(cfg.proteins_per_cluster)];
    row.label = family == cluster ? 1 : 0;
    if (pair_rng.bernoulli(cfg.flip_prob)) row.label = 1 - row.label;
    rows.push_back(std::move(row));
  }
  return rows;
}

void gen_synthetic(const SyntheticConfig& cfg, const std::string& out_path) {
  std::vector<SyntheticRow> rows = gen_synthetic_rows(cfg);
  std::ofstream out(out_path);
  if (!out) throw DataError("cannot write " + out_path);
  out << "smiles\tprotein\tlabel\n";
  for (const auto& row : rows)
    out << row.smiles << '\t' << row.protein << '\t' << row.label << '\n';
  if (!out) throw DataError("write failure on " + out_path);
}

}  // namespace dpi
