// SPDX-License-Identifier: Apache-2.0
#include "dsd/featurize.hpp"

#include <algorithm>
#include <numeric>

namespace dsd {

namespace {

// block offsets in the 48-column layout
constexpr int kOffAtomic = 0;    // 13: H,B,C,N,O,F,P,S,Cl,Br,I,other,virtual
constexpr int kOffChirality = 13;  // 3: None,CW,CCW
constexpr int kOffDegree = 16;   // 8: 0..6,other
constexpr int kOffCharge = 24;   // 6: -2,-1,0,+1,+2,other
constexpr int kOffNumH = 30;     // 6: 0..4,other
constexpr int kOffRadical = 36;  // 4: 0,1,2,other
constexpr int kOffHybrid = 40;   // 4: sp,sp2,sp3,other/virtual
constexpr int kOffAromatic = 44; // 2: no,yes
constexpr int kOffInRing = 46;   // 2: no,yes

int atomic_slot(const Atom& a) {
  if (a.is_virtual) return 12;
  switch (a.atomic_number) {
    case 1: return 0;
    case 5: return 1;
    case 6: return 2;
    case 7: return 3;
    case 8: return 4;
    case 9: return 5;
    case 15: return 6;
    case 16: return 7;
    case 17: return 8;
    case 35: return 9;
    case 53: return 10;
    default: return 11;  // other
  }
}

int hybridization_slot(const MolecularGraph& g, int idx) {
  const Atom& a = g.atoms[std::size_t(idx)];
  if (a.is_virtual) return 3;
  int doubles = 0, triples = 0;
  for (const Bond& b : g.bonds) {
    if (b.a != idx && b.b != idx) continue;
    if (g.has_virtual_node && g.virtual_index &&
        (b.a == *g.virtual_index || b.b == *g.virtual_index))
      continue;
    if (b.order == BondOrder::Double) ++doubles;
    if (b.order == BondOrder::Triple) ++triples;
  }
  if (triples >= 1 || doubles >= 2) return 0;         // sp
  if (a.is_aromatic || doubles == 1) return 1;        // sp2
  return 2;                                           // sp3
}

int relation_of(const MolecularGraph& g, const Bond& b) {
  if (g.has_virtual_node && g.virtual_index &&
      (b.a == *g.virtual_index || b.b == *g.virtual_index))
    return kRelVirtual;
  switch (b.order) {
    case BondOrder::Single: return kRelSingle;
    case BondOrder::Double: return kRelDouble;
    case BondOrder::Triple: return kRelTriple;
    case BondOrder::Aromatic: return kRelAromatic;
  }
  return kRelSingle;
}

}  // namespace

FeaturizedGraph featurize(const MolecularGraph& g) {
  std::size_t n = g.num_atoms();
  FeaturizedGraph f;
  f.node_features = Tensor::zeros({n, std::size_t(kInputDim)});
  for (int i = 0; i < int(n); ++i) {
    const Atom& a = g.atoms[std::size_t(i)];
    double* row = &f.node_features.data[std::size_t(i) * kInputDim];
    row[kOffAtomic + atomic_slot(a)] = 1;
    if (a.is_virtual) {
      // atomic block carries the virtual category; hybridization its
      // other/virtual slot; remaining blocks their first slot
      row[kOffChirality + 0] = 1;
      row[kOffDegree + 0] = 1;
      row[kOffCharge + 0] = 1;
      row[kOffNumH + 0] = 1;
      row[kOffRadical + 0] = 1;
      row[kOffHybrid + 3] = 1;
      row[kOffAromatic + 0] = 1;
      row[kOffInRing + 0] = 1;
      continue;
    }
    row[kOffChirality + int(a.chirality)] = 1;
    int deg = g.degree(i);
    row[kOffDegree + (deg >= 0 && deg <= 6 ? deg : 7)] = 1;
    int q = a.formal_charge;
    row[kOffCharge + (q >= -2 && q <= 2 ? q + 2 : 5)] = 1;
    int h = a.total_h();
    row[kOffNumH + (h >= 0 && h <= 4 ? h : 5)] = 1;
    int r = a.radical_electrons;
    row[kOffRadical + (r >= 0 && r <= 2 ? r : 3)] = 1;
    row[kOffHybrid + hybridization_slot(g, i)] = 1;
    row[kOffAromatic + (a.is_aromatic ? 1 : 0)] = 1;
    bool in_ring = std::size_t(i) < g.ring_membership.size() &&
                   g.ring_membership[std::size_t(i)];
    row[kOffInRing + (in_ring ? 1 : 0)] = 1;
  }

  struct DirEdge { int s, t, r; };
  std::vector<DirEdge> edges;
  edges.reserve(g.bonds.size() * 2 + n);
  for (const Bond& b : g.bonds) {
    int r = relation_of(g, b);
    edges.push_back({b.a, b.b, r});
    edges.push_back({b.b, b.a, r});
  }
  for (int i = 0; i < int(n); ++i) edges.push_back({i, i, kRelSelfLoop});
  std::sort(edges.begin(), edges.end(), [](const DirEdge& a, const DirEdge& b) {
    return a.s != b.s ? a.s < b.s : a.t < b.t;
  });
  for (const DirEdge& e : edges) {
    f.edge_src.push_back(e.s);
    f.edge_tgt.push_back(e.t);
    f.edge_relation.push_back(e.r);
  }
  f.graph_segment.assign(n, 0);
  f.num_graphs = 1;
  return f;
}

FeaturizedGraph batch_graphs(const std::vector<const FeaturizedGraph*>& graphs) {
  FeaturizedGraph out;
  std::size_t total_nodes = 0, total_edges = 0;
  for (const FeaturizedGraph* g : graphs) {
    total_nodes += g->num_nodes();
    total_edges += g->num_edges();
  }
  out.node_features = Tensor::zeros({total_nodes, std::size_t(kInputDim)});
  out.edge_src.reserve(total_edges);
  out.edge_tgt.reserve(total_edges);
  out.edge_relation.reserve(total_edges);
  out.graph_segment.reserve(total_nodes);
  std::size_t node_off = 0;
  int gid = 0;
  for (const FeaturizedGraph* g : graphs) {
    std::copy(g->node_features.data.begin(), g->node_features.data.end(),
              out.node_features.data.begin() + long(node_off) * kInputDim);
    for (std::size_t e = 0; e < g->num_edges(); ++e) {
      out.edge_src.push_back(g->edge_src[e] + int(node_off));
      out.edge_tgt.push_back(g->edge_tgt[e] + int(node_off));
      out.edge_relation.push_back(g->edge_relation[e]);
    }
    for (std::size_t i = 0; i < g->num_nodes(); ++i)
      out.graph_segment.push_back(gid);
    node_off += g->num_nodes();
    ++gid;
  }
  out.num_graphs = graphs.size();
  return out;
}

}  // namespace dsd
