// SPDX-License-Identifier: Apache-2.0
#include "dsd/molgraph.hpp"

#include <algorithm>
#include <queue>
#include <random>

namespace dsd {

namespace {

const char* kElements[] = {"C", "N", "O", "S", "F", "Cl"};

int base_valence(const std::string& el) {
  if (el == "C") return 4;
  if (el == "N") return 3;
  if (el == "O") return 2;
  if (el == "S") return 2;
  return 1;  // F, Cl
}

double spare_valence(const MolecularGraph& g, int i) {
  return base_valence(g.atoms[std::size_t(i)].element) - g.bond_order_sum(i);
}

std::vector<int> bfs_distances(const MolecularGraph& g, int start) {
  std::vector<int> dist(g.num_atoms(), -1);
  std::vector<std::vector<int>> adj(g.num_atoms());
  for (const Bond& b : g.bonds) {
    adj[std::size_t(b.a)].push_back(b.b);
    adj[std::size_t(b.b)].push_back(b.a);
  }
  std::queue<int> q;
  q.push(start);
  dist[std::size_t(start)] = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int u : adj[std::size_t(v)])
      if (dist[std::size_t(u)] == -1) {
        dist[std::size_t(u)] = dist[std::size_t(v)] + 1;
        q.push(u);
      }
  }
  return dist;
}

Atom make_atom(const std::string& el, bool aromatic = false) {
  Atom a;
  a.element = el;
  a.atomic_number = atomic_number_of(el);
  a.is_aromatic = aromatic;
  return a;
}

// One growth attempt; returns false if it wedged (no spare valence left).
bool build_candidate(const GeneratorParams& p, std::mt19937_64& rng,
                     MolecularGraph& g) {
  g = MolecularGraph{};
  std::uniform_int_distribution<int> count_dist(p.min_atoms, p.max_atoms);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::discrete_distribution<int> elem_dist(p.element_weights.begin(),
                                            p.element_weights.end());
  int target = count_dist(rng);

  bool with_aromatic = target >= 6 && u(rng) < p.aromatic_ring_probability;
  if (with_aromatic) {
    for (int i = 0; i < 6; ++i) g.atoms.push_back(make_atom("C", true));
    for (int i = 0; i < 6; ++i) {
      Bond b;
      b.a = i;
      b.b = (i + 1) % 6;
      b.order = BondOrder::Aromatic;
      g.bonds.push_back(b);
    }
  } else {
    std::string el = kElements[std::size_t(elem_dist(rng))];
    if (target > 1)
      while (base_valence(el) < 2) el = kElements[std::size_t(elem_dist(rng))];
    g.atoms.push_back(make_atom(el));
  }

  while (int(g.num_atoms()) < target) {
    std::vector<int> parents;
    for (int i = 0; i < int(g.num_atoms()); ++i)
      if (spare_valence(g, i) >= 1.0 - 1e-9) parents.push_back(i);
    if (parents.empty()) return false;
    int parent = parents[std::size_t(
        std::uniform_int_distribution<int>(0, int(parents.size()) - 1)(rng))];
    std::string el = kElements[std::size_t(elem_dist(rng))];
    BondOrder order = BondOrder::Single;
    if (!g.atoms[std::size_t(parent)].is_aromatic &&
        spare_valence(g, parent) >= 2.0 && base_valence(el) >= 2 &&
        u(rng) < 0.15)
      order = BondOrder::Double;
    g.atoms.push_back(make_atom(el));
    Bond b;
    b.a = parent;
    b.b = int(g.num_atoms()) - 1;
    b.order = order;
    g.bonds.push_back(b);
  }

  // ring closures between distant atoms with spare valence
  std::uniform_int_distribution<int> rc_dist(p.min_ring_closures,
                                             p.max_ring_closures);
  int closures = rc_dist(rng);
  for (int c = 0; c < closures; ++c) {
    std::vector<std::pair<int, int>> cands;
    for (int i = 0; i < int(g.num_atoms()); ++i) {
      if (spare_valence(g, i) < 1.0 - 1e-9) continue;
      std::vector<int> dist = bfs_distances(g, i);
      for (int j = i + 1; j < int(g.num_atoms()); ++j) {
        if (spare_valence(g, j) < 1.0 - 1e-9) continue;
        if (dist[std::size_t(j)] >= 3 && !g.bonded(i, j)) cands.push_back({i, j});
      }
    }
    if (cands.empty()) break;
    auto [i, j] = cands[std::size_t(
        std::uniform_int_distribution<int>(0, int(cands.size()) - 1)(rng))];
    Bond b;
    b.a = i;
    b.b = j;
    b.order = BondOrder::Single;
    g.bonds.push_back(b);
  }

  perceive_rings(g);
  for (int i = 0; i < int(g.num_atoms()); ++i) {
    Atom& a = g.atoms[std::size_t(i)];
    a.implicit_h = implicit_hydrogens(a, g.bond_order_sum(i));
  }
  return true;
}

}  // namespace

std::vector<MolecularGraph> generate_random_library(const GeneratorParams& p,
                                                    int count) {
  if (count < 1) throw BadInput("count must be >= 1");
  if (p.min_atoms < 1 || p.max_atoms < p.min_atoms)
    throw BadInput("atom_count_range is empty");
  if (p.min_ring_closures < 0 || p.max_ring_closures < p.min_ring_closures)
    throw BadInput("ring_closure_count_range is empty");
  if (p.aromatic_ring_probability < 0 || p.aromatic_ring_probability > 1)
    throw BadInput("aromatic_ring_probability must be in [0,1]");
  std::mt19937_64 rng(p.seed);
  std::vector<MolecularGraph> out;
  out.reserve(std::size_t(count));
  const int kMaxRetries = 100;
  while (int(out.size()) < count) {
    MolecularGraph g;
    bool ok = false;
    for (int attempt = 0; attempt < kMaxRetries && !ok; ++attempt) {
      if (!build_candidate(p, rng, g)) continue;
      try {
        MolecularGraph round = parse_smiles(write_smiles(g));
        ok = same_structure(g, round);
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok)
      throw GenerationFailure("could not generate a valid molecule after " +
                              std::to_string(kMaxRetries) + " attempts");
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace dsd
