// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "dsd/molgraph.hpp"
#include "dsd/tensor.hpp"

namespace dsd {

// Edge relation codes consumed by the relational GNN layers.
enum EdgeRelation : int {
  kRelSingle = 0,
  kRelDouble = 1,
  kRelTriple = 2,
  kRelAromatic = 3,
  kRelVirtual = 4,
  kRelSelfLoop = 5,
};
inline constexpr int kNumRelations = 6;

// One-hot layout: nine blocks, 48 columns total.
inline constexpr int kInputDim = 48;

struct FeaturizedGraph {
  Tensor node_features;          // [num_nodes x kInputDim], {0,1}-valued
  std::vector<int> edge_src;     // directed
  std::vector<int> edge_tgt;
  std::vector<int> edge_relation;
  std::vector<int> graph_segment;  // per-node graph id
  std::size_t num_graphs = 1;

  std::size_t num_nodes() const { return graph_segment.size(); }
  std::size_t num_edges() const { return edge_src.size(); }
};

FeaturizedGraph featurize(const MolecularGraph& g);

// Disjoint union with index offsets; graph ids follow input order.
FeaturizedGraph batch_graphs(const std::vector<const FeaturizedGraph*>& graphs);

}  // namespace dsd
