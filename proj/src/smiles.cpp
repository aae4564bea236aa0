#include "dpi/smiles.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <map>
#include <optional>
#include <set>

#include "dpi/errors.hpp"

namespace dpi::chem {

namespace {

const std::vector<std::string> kElements = {"B", "C", "N", "O", "P",
                                            "S", "F", "Cl", "Br", "I"};
const std::string kAromaticLetters = "bcnops";

bool known_element(const std::string& e) {
  return std::find(kElements.begin(), kElements.end(), e) != kElements.end();
}

// Smallest allowed valence that fits the bond order sum, else the largest.
int default_valence(const std::string& element, int bond_sum) {
  std::vector<int> allowed = {4};
  if (element == "B" || element == "N") allowed = {3};
  if (element == "P") allowed = {3, 5};
  if (element == "O") allowed = {2};
  if (element == "S") allowed = {2, 4, 6};
  if (element == "F" || element == "Cl" || element == "Br" || element == "I")
    allowed = {1};
  for (int v : allowed)
    if (v >= bond_sum) return v;
  return allowed.back();
}

// Valence contribution for hydrogen counting. Aromatic bonds count 1 each;
// atoms that carry a double bond in a kekulé assignment (B and C always,
// N and P unless an explicit H marks them pyrrole-like, never O or S) get
// one extra unit. Matches reference toolkits on lowercase-aromatic input.
int bond_order_sum(const Atom& a, const std::vector<const Bond*>& incident) {
  int sum = 0;
  int aromatic_bonds = 0;
  for (const Bond* b : incident) {
    switch (b->order) {
      case BondOrder::single: sum += 1; break;
      case BondOrder::double_bond: sum += 2; break;
      case BondOrder::triple_bond: sum += 3; break;
      case BondOrder::aromatic: ++aromatic_bonds; break;
    }
  }
  sum += aromatic_bonds;
  if (aromatic_bonds > 0) {
    bool kekule_double = a.element == "B" || a.element == "C" ||
                         ((a.element == "N" || a.element == "P") && a.explicit_h < 1);
    if (kekule_double) sum += 1;
  }
  return sum;
}

// A bond is conjugated when both ends carry pi electrons: aromatic atoms or
// atoms with a double or triple bond.
void finalize_conjugation(Molecule& m) {
  std::vector<char> pi(m.atoms.size(), 0);
  for (std::size_t i = 0; i < m.atoms.size(); ++i)
    if (m.atoms[i].aromatic) pi[i] = 1;
  for (const Bond& b : m.bonds)
    if (b.order != BondOrder::single) {
      pi[std::size_t(b.a)] = 1;
      pi[std::size_t(b.b)] = 1;
    }
  for (Bond& b : m.bonds)
    b.conjugated = pi[std::size_t(b.a)] && pi[std::size_t(b.b)];
}

struct PendingRing {
  int atom;
  std::optional<BondOrder> order;
  std::size_t offset;
};

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  Molecule run() {
    if (s_.empty()) throw ParseError(0, "empty input");
    while (pos_ < s_.size()) step();
    if (!ring_open_.empty())
      throw ParseError(ring_open_.begin()->second.offset,
                       "unclosed ring bond " +
                           std::to_string(ring_open_.begin()->first));
    if (!stack_.empty()) throw ParseError(s_.size(), "unclosed branch");
    if (pending_order_) throw ParseError(s_.size(), "dangling bond symbol");
    return std::move(mol_);
  }

  const std::set<int>& maybe_aromatic() const { return maybe_aromatic_; }

 private:
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }

  static BondOrder char_order(char c) {
    switch (c) {
      case '=': return BondOrder::double_bond;
      case '#': return BondOrder::triple_bond;
      case ':': return BondOrder::aromatic;
      default: return BondOrder::single;  // '-', '/', '\' (stereo dropped)
    }
  }

  void step() {
    char c = s_[pos_];
    if (c == '(') {
      if (prev_ < 0) throw ParseError(pos_, "branch before any atom");
      if (pending_order_) throw ParseError(pos_, "bond symbol before branch");
      stack_.push_back(prev_);
      ++pos_;
      return;
    }
    if (c == ')') {
      if (stack_.empty()) throw ParseError(pos_, "unmatched ')'");
      if (pending_order_) throw ParseError(pos_, "dangling bond symbol");
      prev_ = stack_.back();
      stack_.pop_back();
      ++pos_;
      return;
    }
    if (c == '.')
      throw ParseError(pos_, "disconnected components are not supported");
    if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/' || c == '\\') {
      if (pending_order_) throw ParseError(pos_, "two bond symbols in a row");
      if (prev_ < 0) throw ParseError(pos_, "bond symbol before any atom");
      pending_order_ = char_order(c);
      ++pos_;
      return;
    }
    if (is_digit(c)) {
      ring_closure(c - '0', pos_);
      ++pos_;
      return;
    }
    if (c == '%') {
      if (pos_ + 2 >= s_.size() || !is_digit(s_[pos_ + 1]) ||
          !is_digit(s_[pos_ + 2]))
        throw ParseError(pos_, "'%' needs two digits");
      ring_closure((s_[pos_ + 1] - '0') * 10 + (s_[pos_ + 2] - '0'), pos_);
      pos_ += 3;
      return;
    }
    if (c == '[') {
      bracket_atom();
      return;
    }
    organic_atom();
  }

  void organic_atom() {
    std::size_t at = pos_;
    char c = s_[pos_];
    Atom a;
    if (c == 'C' && pos_ + 1 < s_.size() && s_[pos_ + 1] == 'l') {
      a.element = "Cl";
      pos_ += 2;
    } else if (c == 'B' && pos_ + 1 < s_.size() && s_[pos_ + 1] == 'r') {
      a.element = "Br";
      pos_ += 2;
    } else if (c >= 'A' && c <= 'Z' && known_element(std::string(1, c))) {
      a.element = std::string(1, c);
      ++pos_;
    } else if (kAromaticLetters.find(c) != std::string::npos) {
      a.element = std::string(1, char(std::toupper(static_cast<unsigned char>(c))));
      a.aromatic = true;
      ++pos_;
    } else {
      throw ParseError(at, std::string("unexpected character '") + c + "'");
    }
    add_atom(a, at);
  }

  void bracket_atom() {
    std::size_t open = pos_;
    ++pos_;
    while (pos_ < s_.size() && is_digit(s_[pos_])) ++pos_;  // isotope, dropped
    if (pos_ >= s_.size()) throw ParseError(open, "unterminated bracket atom");
    Atom a;
    std::size_t at = pos_;
    char c = s_[pos_];
    if (c >= 'a' && c <= 'z') {
      if (kAromaticLetters.find(c) == std::string::npos)
        throw ParseError(at, std::string("unsupported element '") + c + "'");
      a.element = std::string(1, char(std::toupper(static_cast<unsigned char>(c))));
      a.aromatic = true;
      ++pos_;
    } else if (c >= 'A' && c <= 'Z') {
      std::string sym(1, c);
      if (pos_ + 1 < s_.size() && s_[pos_ + 1] >= 'a' && s_[pos_ + 1] <= 'z' &&
          known_element(sym + s_[pos_ + 1])) {
        sym += s_[pos_ + 1];
        ++pos_;
      }
      if (!known_element(sym))
        throw ParseError(at, "unsupported element '" + sym + "'");
      a.element = sym;
      ++pos_;
    } else {
      throw ParseError(at, "expected element symbol in bracket");
    }
    while (pos_ < s_.size() && s_[pos_] == '@') ++pos_;  // chirality, dropped
    a.explicit_h = 0;
    if (pos_ < s_.size() && s_[pos_] == 'H') {
      ++pos_;
      a.explicit_h = 1;
      if (pos_ < s_.size() && is_digit(s_[pos_])) {
        a.explicit_h = s_[pos_] - '0';
        ++pos_;
      }
    }
    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
      char mark = s_[pos_];
      int sign = mark == '+' ? 1 : -1;
      ++pos_;
      int mag = 1;
      if (pos_ < s_.size() && is_digit(s_[pos_])) {
        mag = s_[pos_] - '0';
        ++pos_;
      } else {
        while (pos_ < s_.size() && s_[pos_] == mark) {
          ++mag;
          ++pos_;
        }
      }
      a.formal_charge = sign * mag;
    }
    if (pos_ < s_.size() && s_[pos_] == ':') {  // atom class, dropped
      ++pos_;
      if (pos_ >= s_.size() || !is_digit(s_[pos_]))
        throw ParseError(pos_, "atom class needs digits");
      while (pos_ < s_.size() && is_digit(s_[pos_])) ++pos_;
    }
    if (pos_ >= s_.size() || s_[pos_] != ']')
      throw ParseError(pos_ < s_.size() ? pos_ : open, "expected ']'");
    ++pos_;
    add_atom(a, open);
  }

  void add_atom(const Atom& a, std::size_t offset) {
    int idx = int(mol_.atoms.size());
    mol_.atoms.push_back(a);
    if (prev_ >= 0) add_bond(prev_, idx, pending_order_, offset);
    pending_order_.reset();
    prev_ = idx;
  }

  void add_bond(int a, int b, std::optional<BondOrder> order,
                std::size_t offset) {
    if (a == b) throw ParseError(offset, "ring bond closes onto its own atom");
    if (mol_.bond_between(a, b) >= 0)
      throw ParseError(offset, "duplicate bond");
    Bond bd;
    bd.a = a;
    bd.b = b;
    if (order) {
      bd.order = *order;
    } else if (mol_.atoms[std::size_t(a)].aromatic &&
               mol_.atoms[std::size_t(b)].aromatic) {
      bd.order = BondOrder::aromatic;  // downgraded to single later if acyclic
      maybe_aromatic_.insert(int(mol_.bonds.size()));
    } else {
      bd.order = BondOrder::single;
    }
    mol_.bonds.push_back(bd);
  }

  void ring_closure(int digit, std::size_t offset) {
    if (prev_ < 0) throw ParseError(offset, "ring bond before any atom");
    auto it = ring_open_.find(digit);
    if (it == ring_open_.end()) {
      ring_open_[digit] = {prev_, pending_order_, offset};
      pending_order_.reset();
      return;
    }
    PendingRing open = it->second;
    ring_open_.erase(it);
    if (open.order && pending_order_ && *open.order != *pending_order_)
      throw ParseError(offset, "ring bond order mismatch");
    std::optional<BondOrder> order = open.order ? open.order : pending_order_;
    pending_order_.reset();
    add_bond(open.atom, prev_, order, offset);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  Molecule mol_;
  int prev_ = -1;
  std::vector<int> stack_;
  std::map<int, PendingRing> ring_open_;
  std::optional<BondOrder> pending_order_;
  std::set<int> maybe_aromatic_;
};

using EdgeMask = std::vector<std::uint64_t>;

EdgeMask empty_mask(std::size_t bonds) { return EdgeMask((bonds + 63) / 64, 0); }

void mask_set(EdgeMask& m, int bit) {
  m[std::size_t(bit) / 64] |= std::uint64_t(1) << (bit % 64);
}

bool mask_test(const EdgeMask& m, int bit) {
  return m[std::size_t(bit) / 64] >> (bit % 64) & 1;
}

bool mask_empty(const EdgeMask& m) {
  for (auto w : m)
    if (w) return false;
  return true;
}

void mask_xor(EdgeMask& a, const EdgeMask& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] ^= b[i];
}

int mask_lowest(const EdgeMask& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i])
      for (int b = 0; b < 64; ++b)
        if (m[i] >> b & 1) return int(i * 64) + b;
  return -1;
}

struct CandidateCycle {
  std::vector<int> atoms;
  EdgeMask edges;
};

void bfs(const Molecule& m, const std::vector<std::vector<int>>& adj, int root,
         std::vector<int>& dist, std::vector<int>& parent) {
  dist.assign(m.atoms.size(), -1);
  parent.assign(m.atoms.size(), -1);
  std::deque<int> q{root};
  dist[std::size_t(root)] = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int bi : adj[std::size_t(u)]) {
      int v = m.bonds[std::size_t(bi)].a == u ? m.bonds[std::size_t(bi)].b
                                              : m.bonds[std::size_t(bi)].a;
      if (dist[std::size_t(v)] < 0) {
        dist[std::size_t(v)] = dist[std::size_t(u)] + 1;
        parent[std::size_t(v)] = u;
        q.push_back(v);
      }
    }
  }
}

std::vector<int> path_to_root(int v, const std::vector<int>& parent) {
  std::vector<int> p{v};
  while (parent[std::size_t(p.back())] >= 0)
    p.push_back(parent[std::size_t(p.back())]);
  return p;
}

}  // namespace

int Molecule::total_h(int atom_index) const {
  const Atom& a = atoms.at(std::size_t(atom_index));
  return (a.explicit_h > 0 ? a.explicit_h : 0) + a.implicit_h;
}

int Molecule::bond_between(int a, int b) const {
  for (std::size_t i = 0; i < bonds.size(); ++i)
    if ((bonds[i].a == a && bonds[i].b == b) ||
        (bonds[i].a == b && bonds[i].b == a))
      return int(i);
  return -1;
}

std::vector<std::vector<int>> Molecule::neighbor_bonds() const {
  std::vector<std::vector<int>> adj(atoms.size());
  for (std::size_t i = 0; i < bonds.size(); ++i) {
    adj[std::size_t(bonds[i].a)].push_back(int(i));
    adj[std::size_t(bonds[i].b)].push_back(int(i));
  }
  return adj;
}

// Horton-style minimum cycle basis: candidate cycles go through every
// (vertex, edge) pair along shortest paths, smallest first, accepted
// greedily when independent over GF(2) edge sets.
void perceive_rings(Molecule& m) {
  m.rings.clear();
  for (Atom& a : m.atoms) {
    a.in_ring = false;
    a.ring_sizes.clear();
  }
  for (Bond& b : m.bonds) {
    b.in_ring = false;
    b.ring_sizes.clear();
  }
  finalize_conjugation(m);
  if (m.bonds.size() + 1 <= m.atoms.size()) return;
  std::size_t want = m.bonds.size() + 1 - m.atoms.size();
  auto adj = m.neighbor_bonds();

  std::vector<CandidateCycle> candidates;
  std::vector<int> dist, parent;
  for (int root = 0; root < int(m.atoms.size()); ++root) {
    bfs(m, adj, root, dist, parent);
    for (const Bond& bond : m.bonds) {
      int x = bond.a, y = bond.b;
      if (dist[std::size_t(x)] < 0 || dist[std::size_t(y)] < 0) continue;
      auto px = path_to_root(x, parent);
      auto py = path_to_root(y, parent);
      std::set<int> seen(px.begin(), px.end());
      bool disjoint = true;
      for (std::size_t i = 0; i + 1 < py.size(); ++i)
        if (seen.count(py[i])) disjoint = false;
      if (!disjoint) continue;
      CandidateCycle c;
      c.atoms = px;                        // x .. root
      std::reverse(py.begin(), py.end());  // root .. y
      c.atoms.insert(c.atoms.end(), py.begin() + 1, py.end());
      if (c.atoms.size() < 3) continue;
      c.edges = empty_mask(m.bonds.size());
      bool ok = true;
      for (std::size_t i = 0; i < c.atoms.size() && ok; ++i) {
        int bi = m.bond_between(c.atoms[i], c.atoms[(i + 1) % c.atoms.size()]);
        if (bi < 0) ok = false;
        else mask_set(c.edges, bi);
      }
      if (ok) candidates.push_back(std::move(c));
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const CandidateCycle& a, const CandidateCycle& b) {
                     if (a.atoms.size() != b.atoms.size())
                       return a.atoms.size() < b.atoms.size();
                     return a.edges < b.edges;
                   });

  // Greedy GF(2) independence via Gaussian elimination on edge sets.
  std::vector<EdgeMask> reduced;
  for (const CandidateCycle& c : candidates) {
    if (m.rings.size() == want) break;
    EdgeMask r = c.edges;
    for (const EdgeMask& basis : reduced) {
      int pivot = mask_lowest(basis);
      if (pivot >= 0 && mask_test(r, pivot)) mask_xor(r, basis);
    }
    if (mask_empty(r)) continue;
    reduced.push_back(r);
    m.rings.push_back(c.atoms);
    int size = int(c.atoms.size());
    for (int a : c.atoms) {
      m.atoms[std::size_t(a)].in_ring = true;
      m.atoms[std::size_t(a)].ring_sizes.push_back(size);
    }
    for (std::size_t i = 0; i < c.atoms.size(); ++i) {
      int bi = m.bond_between(c.atoms[i], c.atoms[(i + 1) % c.atoms.size()]);
      m.bonds[std::size_t(bi)].in_ring = true;
      m.bonds[std::size_t(bi)].ring_sizes.push_back(size);
    }
  }
}

Molecule parse_smiles(const std::string& s) {
  Parser p(s);
  Molecule m = p.run();
  perceive_rings(m);

  // An unmarked bond between aromatic atoms is aromatic only inside a ring.
  for (int bi : p.maybe_aromatic()) {
    Bond& b = m.bonds[std::size_t(bi)];
    if (!b.in_ring) b.order = BondOrder::single;
  }
  for (std::size_t i = 0; i < m.atoms.size(); ++i)
    if (m.atoms[i].aromatic && !m.atoms[i].in_ring)
      throw ParseError(0,
                       "aromatic atom " + std::to_string(i) + " outside a ring");
  for (const Bond& b : m.bonds)
    if (b.order == BondOrder::aromatic &&
        !(m.atoms[std::size_t(b.a)].aromatic &&
          m.atoms[std::size_t(b.b)].aromatic))
      throw ParseError(0, "aromatic bond between non-aromatic atoms");

  auto adj = m.neighbor_bonds();
  for (std::size_t i = 0; i < m.atoms.size(); ++i) {
    Atom& a = m.atoms[i];
    a.degree = int(adj[i].size());
    std::vector<const Bond*> incident;
    for (int bi : adj[i]) incident.push_back(&m.bonds[std::size_t(bi)]);
    int sum = bond_order_sum(a, incident);
    int expl = a.explicit_h > 0 ? a.explicit_h : 0;
    int v = default_valence(a.element, sum);
    a.implicit_h = std::max(0, v - sum - expl - std::abs(a.formal_charge));
  }
  finalize_conjugation(m);
  return m;
}

const char* bond_order_name(BondOrder o) {
  switch (o) {
    case BondOrder::single: return "single";
    case BondOrder::double_bond: return "double";
    case BondOrder::triple_bond: return "triple";
    case BondOrder::aromatic: return "aromatic";
  }
  return "?";
}

namespace {

std::string atom_token(const Atom& a) {
  std::string sym = a.element;
  if (a.aromatic)
    for (char& c : sym) c = char(std::tolower(static_cast<unsigned char>(c)));
  if (a.formal_charge == 0 && a.explicit_h < 0) return sym;
  std::string t = "[" + sym;
  int h = a.explicit_h > 0 ? a.explicit_h : 0;
  if (h == 1) t += "H";
  if (h > 1) t += "H" + std::to_string(h);
  if (a.formal_charge == 1) t += "+";
  if (a.formal_charge == -1) t += "-";
  if (a.formal_charge > 1) t += "+" + std::to_string(a.formal_charge);
  if (a.formal_charge < -1) t += "-" + std::to_string(-a.formal_charge);
  return t + "]";
}

std::string bond_token(const Molecule& m, const Bond& b) {
  switch (b.order) {
    case BondOrder::double_bond: return "=";
    case BondOrder::triple_bond: return "#";
    case BondOrder::aromatic: return "";  // implied between aromatic ring atoms
    case BondOrder::single:
      // "cc" would read back as aromatic inside a ring, so force '-'
      if (m.atoms[std::size_t(b.a)].aromatic &&
          m.atoms[std::size_t(b.b)].aromatic)
        return "-";
      return "";
  }
  return "";
}

// Two passes: a DFS classifies bonds into tree and ring-closure bonds, then
// the same traversal prints tokens, so closure digits appear at both ends.
struct Writer {
  const Molecule& m;
  std::vector<std::vector<int>> adj;
  std::vector<char> visited;
  std::vector<std::vector<int>> tree_children;  // bond indices, per atom
  std::vector<std::vector<int>> opens_at;       // ring bonds opening here
  std::vector<std::vector<int>> closes_at;      // ring bonds closing here
  std::map<int, int> digit_of;
  std::set<int> free_digits;
  std::string out;

  explicit Writer(const Molecule& mol)
      : m(mol), adj(mol.neighbor_bonds()), visited(mol.atoms.size(), 0),
        tree_children(mol.atoms.size()), opens_at(mol.atoms.size()),
        closes_at(mol.atoms.size()) {
    for (int d = 1; d < 100; ++d) free_digits.insert(d);
  }

  void classify(int atom) {
    visited[std::size_t(atom)] = 1;
    for (int bi : adj[std::size_t(atom)]) {
      const Bond& b = m.bonds[std::size_t(bi)];
      int other = b.a == atom ? b.b : b.a;
      if (visited[std::size_t(other)]) continue;
      tree_children[std::size_t(atom)].push_back(bi);
      classify(other);
    }
    // bonds not used as tree edges anywhere become ring closures below
  }

  void find_ring_bonds() {
    std::vector<char> is_tree(m.bonds.size(), 0);
    for (const auto& kids : tree_children)
      for (int bi : kids) is_tree[std::size_t(bi)] = 1;
    std::vector<int> order(m.atoms.size(), -1);
    int counter = 0;
    // pre-order ranks follow the same traversal
    rank_walk(0, order, counter);
    for (std::size_t bi = 0; bi < m.bonds.size(); ++bi) {
      if (is_tree[bi]) continue;
      const Bond& b = m.bonds[bi];
      int first = order[std::size_t(b.a)] < order[std::size_t(b.b)] ? b.a : b.b;
      int second = first == b.a ? b.b : b.a;
      opens_at[std::size_t(first)].push_back(int(bi));
      closes_at[std::size_t(second)].push_back(int(bi));
    }
  }

  void rank_walk(int atom, std::vector<int>& order, int& counter) {
    order[std::size_t(atom)] = counter++;
    for (int bi : tree_children[std::size_t(atom)]) {
      const Bond& b = m.bonds[std::size_t(bi)];
      rank_walk(b.a == atom ? b.b : b.a, order, counter);
    }
  }

  void emit_digit(int bond, bool opening) {
    if (opening) {
      int d = *free_digits.begin();
      free_digits.erase(free_digits.begin());
      digit_of[bond] = d;
    }
    int d = digit_of.at(bond);
    out += bond_token(m, m.bonds[std::size_t(bond)]);
    if (d >= 10) out += '%';
    out += std::to_string(d);
    if (!opening) {
      free_digits.insert(d);
      digit_of.erase(bond);
    }
  }

  void print(int atom) {
    out += atom_token(m.atoms[std::size_t(atom)]);
    for (int bi : opens_at[std::size_t(atom)]) emit_digit(bi, true);
    for (int bi : closes_at[std::size_t(atom)]) emit_digit(bi, false);
    const auto& kids = tree_children[std::size_t(atom)];
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const Bond& b = m.bonds[std::size_t(kids[i])];
      int child = b.a == atom ? b.b : b.a;
      bool last = i + 1 == kids.size();
      if (!last) out += "(";
      out += bond_token(m, b);
      print(child);
      if (!last) out += ")";
    }
  }
};

}  // namespace

std::string write_smiles(const Molecule& m) {
  if (m.atoms.empty()) throw DataError("cannot write an empty molecule");
  Writer w(m);
  w.classify(0);
  for (std::size_t i = 0; i < m.atoms.size(); ++i)
    if (!w.visited[i]) throw DataError("molecule is disconnected");
  w.find_ring_bonds();
  w.print(0);
  return w.out;
}

}  // namespace dpi::chem
