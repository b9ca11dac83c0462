// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "dsd/autodiff.hpp"
#include "dsd/featurize.hpp"

namespace dsd {

enum class Architecture {
  GIN,
  GATv2,
  FiLM,
  FiLMv2,
  FiLMv2Tanh,
  FiLMv2SourceAct,
};

std::string architecture_name(Architecture a);
Architecture architecture_from_name(const std::string& name);

struct ModelConfig {
  Architecture architecture = Architecture::FiLMv2;
  std::size_t hidden_dim = 64;
  std::size_t num_layers = 4;
  double dropout_rate = 0.1;
  std::size_t input_dim = kInputDim;
};

// Named parameter tensors; std::map keeps a deterministic order.
using ModelParams = std::map<std::string, Tensor>;

ModelParams init_params(const ModelConfig& cfg, uint64_t seed);

// Parameter leaves registered on a tape, addressable by name.
struct TapeParams {
  std::map<std::string, Tape::NodeId> ids;
  Tape::NodeId at(const std::string& name) const;
};

TapeParams register_params(Tape& tape, const ModelParams& params);

// Full model: input projection, stacked graph layers with
// layer_norm/dropout/relu between them, mean pool, linear head.
// Returns a [num_graphs x 1] node of standardized scores.
Tape::NodeId forward_on_tape(Tape& tape, const ModelConfig& cfg,
                             const TapeParams& params,
                             const FeaturizedGraph& batch, bool training,
                             std::mt19937_64* dropout_rng);

// Inference convenience: evaluation mode, plain vector out.
std::vector<double> forward(const ModelConfig& cfg, const ModelParams& params,
                            const FeaturizedGraph& batch);

// Single graph layer (exposed for layer-level tests). `h` is a tape node of
// shape [num_nodes x hidden_dim]; `layer` selects the parameter prefix
// "layer<i>.".
Tape::NodeId graph_layer(Tape& tape, Architecture arch, Tape::NodeId h,
                         const FeaturizedGraph& batch, const TapeParams& params,
                         std::size_t layer);

}  // namespace dsd
