// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <random>
#include <vector>

#include "dsd/tensor.hpp"

namespace dsd {

// Reverse-mode tape. Operations append nodes; node ids are indices into the
// tape and are already in topological order, so backward() is a single
// reverse sweep. A tape is confined to one logical thread.
class Tape {
 public:
  using NodeId = int;

  NodeId leaf(Tensor value);

  const Tensor& value(NodeId id) const { return nodes_[id].value; }
  const Tensor& grad(NodeId id) const { return nodes_[id].grad; }

  // Dense ops
  NodeId matmul(NodeId a, NodeId b);
  NodeId add(NodeId a, NodeId b);       // exact shape, or one side scalar
  NodeId mul(NodeId a, NodeId b);       // exact shape, or one side scalar
  NodeId relu(NodeId a);
  NodeId tanh(NodeId a);
  NodeId exp(NodeId a);
  NodeId scale(NodeId a, double s);
  NodeId leaky_relu(NodeId a, double negative_slope);
  NodeId add_bias(NodeId x, NodeId bias);  // [n x d] + [d]
  NodeId sum(NodeId a);                    // reduce everything to a scalar

  // Row indexing / graph aggregation
  NodeId gather_rows(NodeId x, const std::vector<int>& rows);
  NodeId scatter_rows(NodeId x, const std::vector<int>& rows,
                      std::size_t total_rows);
  NodeId segment_sum(NodeId x, const std::vector<int>& segment,
                     std::size_t num_segments);
  NodeId segment_mean(NodeId x, const std::vector<int>& segment,
                      std::size_t num_segments);
  // Softmax over rows of an [E x 1] tensor, normalized within each segment.
  NodeId segment_softmax(NodeId x, const std::vector<int>& segment,
                         std::size_t num_segments);
  NodeId broadcast_cols(NodeId x, std::size_t d);  // [n x 1] -> [n x d]

  NodeId layer_norm(NodeId x, NodeId gain, NodeId bias, double eps = 1e-5);
  // Inverted dropout: identity when !training or rate == 0.
  NodeId dropout(NodeId x, double rate, std::mt19937_64& rng, bool training);

  void backward(NodeId loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void(Tape&)> back;  // accumulate into input grads
  };

  NodeId push(Tensor value, std::function<void(Tape&)> back);
  Tensor& grad_ref(NodeId id) { return nodes_[id].grad; }
  void accumulate(NodeId id, const Tensor& g);

  std::vector<Node> nodes_;
};

// Builds a scalar loss on a fresh tape from leaf parameter nodes.
using GraphBuilder =
    std::function<Tape::NodeId(Tape&, const std::vector<Tape::NodeId>&)>;

// Central-difference gradient check. Returns the max relative error
// |g_ad - g_fd| / max(1e-8, |g_ad| + |g_fd|) over all parameter coordinates.
double check_gradients(const GraphBuilder& build,
                       const std::vector<Tensor>& params, double step = 1e-5);

}  // namespace dsd
