#pragma once

#include <string>
#include <vector>

namespace dpi::chem {

enum class BondOrder { single, double_bond, triple_bond, aromatic };

struct Atom {
  std::string element;
  int formal_charge = 0;
  int explicit_h = -1;  // -1 = unset (organic-subset atom), >= 0 from brackets
  bool aromatic = false;
  // derived
  int degree = 0;
  int implicit_h = 0;
  bool in_ring = false;
  std::vector<int> ring_sizes;  // sizes of basis cycles through this atom
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::single;
  bool in_ring = false;
  bool conjugated = false;
  std::vector<int> ring_sizes;
};

struct Molecule {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::vector<std::vector<int>> rings;  // cycle basis, each an atom-index cycle

  int total_h(int atom_index) const;
  int bond_between(int a, int b) const;            // bond index or -1
  std::vector<std::vector<int>> neighbor_bonds() const;  // bond indices per atom
};

// Parses the OpenSMILES subset: organic-subset atoms B C N O P S F Cl Br I,
// aromatic lowercase b c n o p s, bracket atoms with isotope/charge/H-count,
// bond symbols - = # : / \, branches, ring closures 0-9 and %nn. Stereo and
// isotope annotations are accepted and dropped. Dots are rejected. The
// returned molecule has rings perceived and hydrogen counts resolved.
Molecule parse_smiles(const std::string& s);

// Minimum cycle basis (Horton) of the bond graph; sets in_ring, ring_sizes
// and conjugation flags. Idempotent.
void perceive_rings(Molecule& m);

// Plain (non-canonical) writer, round-trip support only.
std::string write_smiles(const Molecule& m);

const char* bond_order_name(BondOrder o);

}  // namespace dpi::chem
