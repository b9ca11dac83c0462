// SPDX-License-Identifier: Apache-2.0
#include "dsd/molgraph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <tuple>

namespace dsd {

namespace {

double order_value(BondOrder o) {
  switch (o) {
    case BondOrder::Single: return 1.0;
    case BondOrder::Double: return 2.0;
    case BondOrder::Triple: return 3.0;
    case BondOrder::Aromatic: return 1.5;
  }
  return 1.0;
}

}  // namespace

int atomic_number_of(const std::string& element) {
  static const std::map<std::string, int> table = {
      {"H", 1},  {"B", 5},  {"C", 6},  {"N", 7},  {"O", 8},  {"F", 9},
      {"P", 15}, {"S", 16}, {"Cl", 17}, {"Br", 35}, {"I", 53}};
  auto it = table.find(element);
  return it == table.end() ? 0 : it->second;
}

int MolecularGraph::degree(int i) const {
  int d = 0;
  for (const Bond& b : bonds) {
    if (has_virtual_node && virtual_index &&
        (b.a == *virtual_index || b.b == *virtual_index))
      continue;
    if (b.a == i || b.b == i) ++d;
  }
  return d;
}

double MolecularGraph::bond_order_sum(int i) const {
  double s = 0;
  for (const Bond& b : bonds) {
    if (has_virtual_node && virtual_index &&
        (b.a == *virtual_index || b.b == *virtual_index))
      continue;
    if (b.a == i || b.b == i) s += order_value(b.order);
  }
  return s;
}

bool MolecularGraph::bonded(int i, int j) const {
  for (const Bond& b : bonds)
    if ((b.a == i && b.b == j) || (b.a == j && b.b == i)) return true;
  return false;
}

void perceive_rings(MolecularGraph& g) {
  int n = int(g.num_atoms());
  g.ring_membership.assign(std::size_t(n), false);
  // adjacency over non-virtual edges
  // (neighbor, bond index)
  std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(n));
  for (int bi = 0; bi < int(g.bonds.size()); ++bi) {
    const Bond& b = g.bonds[std::size_t(bi)];
    if (g.has_virtual_node && g.virtual_index &&
        (b.a == *g.virtual_index || b.b == *g.virtual_index))
      continue;
    adj[std::size_t(b.a)].push_back({b.b, bi});
    adj[std::size_t(b.b)].push_back({b.a, bi});
  }
  // Tarjan bridge finding; an edge lies on a cycle iff it is not a bridge.
  std::vector<int> disc(std::size_t(n), -1), low(std::size_t(n), 0);
  std::vector<bool> bridge(g.bonds.size(), false);
  int timer = 0;
  std::function<void(int, int)> dfs = [&](int v, int in_edge) {
    disc[std::size_t(v)] = low[std::size_t(v)] = timer++;
    for (auto [u, bi] : adj[std::size_t(v)]) {
      if (bi == in_edge) continue;
      if (disc[std::size_t(u)] == -1) {
        dfs(u, bi);
        low[std::size_t(v)] = std::min(low[std::size_t(v)], low[std::size_t(u)]);
        if (low[std::size_t(u)] > disc[std::size_t(v)]) bridge[std::size_t(bi)] = true;
      } else {
        low[std::size_t(v)] = std::min(low[std::size_t(v)], disc[std::size_t(u)]);
      }
    }
  };
  for (int v = 0; v < n; ++v)
    if (disc[std::size_t(v)] == -1) dfs(v, -1);
  for (int bi = 0; bi < int(g.bonds.size()); ++bi) {
    const Bond& b = g.bonds[std::size_t(bi)];
    if (g.has_virtual_node && g.virtual_index &&
        (b.a == *g.virtual_index || b.b == *g.virtual_index))
      continue;
    if (!bridge[std::size_t(bi)]) {
      g.ring_membership[std::size_t(b.a)] = true;
      g.ring_membership[std::size_t(b.b)] = true;
    }
  }
}

int cycle_count(const MolecularGraph& g) {
  int n = 0, e = 0;
  std::vector<int> comp(g.num_atoms(), -1);
  std::vector<std::vector<int>> adj(g.num_atoms());
  for (const Bond& b : g.bonds) {
    if (g.has_virtual_node && g.virtual_index &&
        (b.a == *g.virtual_index || b.b == *g.virtual_index))
      continue;
    ++e;
    adj[std::size_t(b.a)].push_back(b.b);
    adj[std::size_t(b.b)].push_back(b.a);
  }
  int components = 0;
  for (int v = 0; v < int(g.num_atoms()); ++v) {
    if (g.has_virtual_node && g.virtual_index && v == *g.virtual_index) continue;
    ++n;
    if (comp[std::size_t(v)] != -1) continue;
    ++components;
    std::vector<int> stack{v};
    comp[std::size_t(v)] = components;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int w : adj[std::size_t(u)])
        if (comp[std::size_t(w)] == -1) {
          comp[std::size_t(w)] = components;
          stack.push_back(w);
        }
    }
  }
  return e - n + components;
}

int implicit_hydrogens(const Atom& a, double bond_order_sum) {
  if (a.is_virtual) return 0;
  double valence;
  const std::string& el = a.element;
  if (el == "C") valence = 4;
  else if (el == "N") valence = 3;
  else if (el == "O") valence = 2;
  else if (el == "B") valence = 3;
  else if (el == "P") valence = bond_order_sum > 3.0 ? 5 : 3;
  else if (el == "S") valence = bond_order_sum > 4.0 ? 6 : (bond_order_sum > 2.0 ? 4 : 2);
  else if (el == "F" || el == "Cl" || el == "Br" || el == "I" || el == "H")
    valence = 1;
  else
    return 0;
  if (a.formal_charge > 0 && (el == "N" || el == "P")) valence += a.formal_charge;
  else if (a.formal_charge < 0) valence += a.formal_charge;
  double diff = valence - bond_order_sum - a.explicit_h;
  int h = int(std::floor(diff + 0.5));
  return std::max(0, h);
}

MolecularGraph add_virtual_node(const MolecularGraph& g) {
  if (g.has_virtual_node)
    throw AlreadyAugmented("graph already has a virtual node");
  if (g.num_atoms() == 0)
    throw BadInput("cannot augment an empty graph");
  MolecularGraph out = g;
  Atom v;
  v.element = "*";
  v.is_virtual = true;
  out.atoms.push_back(v);
  int vi = int(out.atoms.size()) - 1;
  for (int i = 0; i < vi; ++i) {
    Bond b;
    b.a = i;
    b.b = vi;
    b.order = BondOrder::Single;  // relation overridden to Virtual in featurize
    out.bonds.push_back(b);
  }
  out.has_virtual_node = true;
  out.virtual_index = vi;
  out.ring_membership.push_back(false);
  return out;
}

namespace {

std::string canonical_form(const MolecularGraph& g) {
  std::vector<std::string> atom_keys;
  std::vector<int> degrees;
  for (int i = 0; i < int(g.num_atoms()); ++i) {
    const Atom& a = g.atoms[std::size_t(i)];
    if (a.is_virtual) continue;
    std::ostringstream os;
    os << a.element << '|' << a.formal_charge << '|' << a.total_h() << '|'
       << int(a.is_aromatic) << '|' << int(a.chirality) << '|'
       << a.radical_electrons << '|' << int(g.ring_membership.size() > std::size_t(i) &&
                                            g.ring_membership[std::size_t(i)]);
    atom_keys.push_back(os.str());
    degrees.push_back(g.degree(i));
  }
  std::vector<std::string> bond_keys;
  for (const Bond& b : g.bonds) {
    if (g.has_virtual_node && g.virtual_index &&
        (b.a == *g.virtual_index || b.b == *g.virtual_index))
      continue;
    std::string ea = g.atoms[std::size_t(b.a)].element;
    std::string eb = g.atoms[std::size_t(b.b)].element;
    if (eb < ea) std::swap(ea, eb);
    bond_keys.push_back(ea + "~" + eb + "~" + std::to_string(int(b.order)));
  }
  std::sort(atom_keys.begin(), atom_keys.end());
  std::sort(degrees.begin(), degrees.end());
  std::sort(bond_keys.begin(), bond_keys.end());
  std::ostringstream os;
  for (const auto& k : atom_keys) os << k << ';';
  os << '#';
  for (int d : degrees) os << d << ',';
  os << '#';
  for (const auto& k : bond_keys) os << k << ';';
  os << '#' << cycle_count(g);
  return os.str();
}

}  // namespace

bool same_structure(const MolecularGraph& a, const MolecularGraph& b) {
  return canonical_form(a) == canonical_form(b);
}

uint64_t structure_hash(const MolecularGraph& g) {
  std::string s = canonical_form(g);
  uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace dsd
