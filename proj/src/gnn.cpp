// SPDX-License-Identifier: Apache-2.0
#include "dsd/gnn.hpp"

#include <stdexcept>

namespace dsd {

std::string architecture_name(Architecture a) {
  switch (a) {
    case Architecture::GIN: return "gin";
    case Architecture::GATv2: return "gatv2";
    case Architecture::FiLM: return "film";
    case Architecture::FiLMv2: return "filmv2";
    case Architecture::FiLMv2Tanh: return "filmv2-tanh";
    case Architecture::FiLMv2SourceAct: return "filmv2-source-act";
  }
  return "unknown";
}

Architecture architecture_from_name(const std::string& name) {
  if (name == "gin") return Architecture::GIN;
  if (name == "gatv2") return Architecture::GATv2;
  if (name == "film") return Architecture::FiLM;
  if (name == "filmv2") return Architecture::FiLMv2;
  if (name == "filmv2-tanh") return Architecture::FiLMv2Tanh;
  if (name == "filmv2-source-act") return Architecture::FiLMv2SourceAct;
  throw BadInput("unknown architecture: " + name);
}

ModelParams init_params(const ModelConfig& cfg, uint64_t seed) {
  std::mt19937_64 rng(seed);
  ModelParams p;
  std::size_t h = cfg.hidden_dim;
  p["proj.W"] = Tensor::glorot(cfg.input_dim, h, rng);
  p["proj.b"] = Tensor::bias_uniform(cfg.input_dim, h, rng);
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    std::string lp = "layer" + std::to_string(l) + ".";
    switch (cfg.architecture) {
      case Architecture::FiLM:
      case Architecture::FiLMv2:
      case Architecture::FiLMv2Tanh:
      case Architecture::FiLMv2SourceAct:
        for (int r = 0; r < kNumRelations; ++r) {
          std::string rp = lp + "rel" + std::to_string(r) + ".";
          p[rp + "Wg"] = Tensor::glorot(h, h, rng);
          p[rp + "Wa"] = Tensor::glorot(h, h, rng);
          p[rp + "Wb"] = Tensor::glorot(h, h, rng);
        }
        break;
      case Architecture::GIN:
        for (int r = 0; r < kNumRelations; ++r)
          p[lp + "rel" + std::to_string(r) + ".W"] = Tensor::glorot(h, h, rng);
        p[lp + "eps"] = Tensor::zeros({1});
        p[lp + "mlp.W1"] = Tensor::glorot(h, h, rng);
        p[lp + "mlp.b1"] = Tensor::bias_uniform(h, h, rng);
        p[lp + "mlp.W2"] = Tensor::glorot(h, h, rng);
        p[lp + "mlp.b2"] = Tensor::bias_uniform(h, h, rng);
        break;
      case Architecture::GATv2:
        for (int r = 0; r < kNumRelations; ++r) {
          std::string rp = lp + "rel" + std::to_string(r) + ".";
          p[rp + "Ws"] = Tensor::glorot(h, h, rng);
          p[rp + "Wt"] = Tensor::glorot(h, h, rng);
        }
        p[lp + "att"] = Tensor::glorot(h, 1, rng);
        break;
    }
    if (l + 1 < cfg.num_layers) {
      p["norm" + std::to_string(l) + ".gain"] = Tensor::full({h}, 1.0);
      p["norm" + std::to_string(l) + ".bias"] = Tensor::bias_uniform(h, h, rng);
    }
  }
  p["head.W"] = Tensor::glorot(h, 1, rng);
  p["head.b"] = Tensor::bias_uniform(h, 1, rng);
  return p;
}

Tape::NodeId TapeParams::at(const std::string& name) const {
  auto it = ids.find(name);
  if (it == ids.end()) throw BadInput("missing parameter: " + name);
  return it->second;
}

TapeParams register_params(Tape& tape, const ModelParams& params) {
  TapeParams tp;
  for (const auto& [name, tensor] : params) tp.ids[name] = tape.leaf(tensor);
  return tp;
}

namespace {

struct RelationEdges {
  std::vector<int> src, tgt, index;  // index into the full edge list
};

std::vector<RelationEdges> split_by_relation(const FeaturizedGraph& b) {
  std::vector<RelationEdges> rel(kNumRelations);
  for (std::size_t e = 0; e < b.num_edges(); ++e) {
    int r = b.edge_relation[e];
    rel[std::size_t(r)].src.push_back(b.edge_src[e]);
    rel[std::size_t(r)].tgt.push_back(b.edge_tgt[e]);
    rel[std::size_t(r)].index.push_back(int(e));
  }
  return rel;
}

Tape::NodeId film_family(Tape& t, Architecture arch, Tape::NodeId h,
                         const FeaturizedGraph& batch, const TapeParams& p,
                         std::size_t layer) {
  std::size_t n = batch.num_nodes();
  std::size_t d = t.value(h).cols();
  auto rels = split_by_relation(batch);
  Tape::NodeId acc = t.leaf(Tensor::zeros({n, d}));
  std::string lp = "layer" + std::to_string(layer) + ".";
  for (int r = 0; r < kNumRelations; ++r) {
    const RelationEdges& re = rels[std::size_t(r)];
    if (re.src.empty()) continue;
    std::string rp = lp + "rel" + std::to_string(r) + ".";
    auto hs = t.gather_rows(h, re.src);
    auto ht = t.gather_rows(h, re.tgt);
    auto gamma = t.matmul(ht, p.at(rp + "Wg"));
    auto alpha = t.matmul(hs, p.at(rp + "Wa"));
    auto beta = t.matmul(ht, p.at(rp + "Wb"));
    Tape::NodeId msg;
    switch (arch) {
      case Architecture::FiLM:
        msg = t.relu(t.add(t.mul(gamma, alpha), beta));
        break;
      case Architecture::FiLMv2:
        msg = t.add(t.mul(t.relu(gamma), alpha), t.relu(beta));
        break;
      case Architecture::FiLMv2Tanh:
        msg = t.add(t.mul(t.tanh(gamma), alpha), t.tanh(beta));
        break;
      case Architecture::FiLMv2SourceAct:
        msg = t.add(t.mul(t.relu(gamma), t.relu(alpha)), t.relu(beta));
        break;
      default:
        throw BadInput("not a FiLM-family architecture");
    }
    acc = t.add(acc, t.segment_sum(msg, re.tgt, n));
  }
  return arch == Architecture::FiLMv2Tanh ? t.tanh(acc) : t.relu(acc);
}

Tape::NodeId gin(Tape& t, Tape::NodeId h, const FeaturizedGraph& batch,
                 const TapeParams& p, std::size_t layer) {
  std::size_t n = batch.num_nodes();
  std::size_t d = t.value(h).cols();
  auto rels = split_by_relation(batch);
  std::string lp = "layer" + std::to_string(layer) + ".";
  auto one_plus_eps = t.add(p.at(lp + "eps"), t.leaf(Tensor({1}, {1.0})));
  Tape::NodeId acc = t.mul(h, one_plus_eps);
  for (int r = 0; r < kNumRelations; ++r) {
    const RelationEdges& re = rels[std::size_t(r)];
    if (re.src.empty()) continue;
    auto hs = t.gather_rows(h, re.src);
    auto m = t.matmul(hs, p.at(lp + "rel" + std::to_string(r) + ".W"));
    acc = t.add(acc, t.segment_sum(m, re.tgt, n));
  }
  (void)d;
  auto z = t.relu(t.add_bias(t.matmul(acc, p.at(lp + "mlp.W1")),
                             p.at(lp + "mlp.b1")));
  return t.add_bias(t.matmul(z, p.at(lp + "mlp.W2")), p.at(lp + "mlp.b2"));
}

Tape::NodeId gatv2(Tape& t, Tape::NodeId h, const FeaturizedGraph& batch,
                   const TapeParams& p, std::size_t layer) {
  std::size_t n = batch.num_nodes();
  std::size_t d = t.value(h).cols();
  std::size_t E = batch.num_edges();
  auto rels = split_by_relation(batch);
  std::string lp = "layer" + std::to_string(layer) + ".";
  Tape::NodeId scores = t.leaf(Tensor::zeros({E, 1}));
  Tape::NodeId msgs = t.leaf(Tensor::zeros({E, d}));
  for (int r = 0; r < kNumRelations; ++r) {
    const RelationEdges& re = rels[std::size_t(r)];
    if (re.src.empty()) continue;
    std::string rp = lp + "rel" + std::to_string(r) + ".";
    auto hs = t.gather_rows(h, re.src);
    auto ht = t.gather_rows(h, re.tgt);
    auto s = t.matmul(hs, p.at(rp + "Ws"));
    auto tt = t.matmul(ht, p.at(rp + "Wt"));
    auto score = t.matmul(t.leaky_relu(t.add(s, tt), 0.2), p.at(lp + "att"));
    scores = t.add(scores, t.scatter_rows(score, re.index, E));
    msgs = t.add(msgs, t.scatter_rows(s, re.index, E));
  }
  auto attn = t.segment_softmax(scores, batch.edge_tgt, n);
  auto weighted = t.mul(t.broadcast_cols(attn, d), msgs);
  return t.segment_sum(weighted, batch.edge_tgt, n);
}

}  // namespace

Tape::NodeId graph_layer(Tape& tape, Architecture arch, Tape::NodeId h,
                         const FeaturizedGraph& batch, const TapeParams& params,
                         std::size_t layer) {
  switch (arch) {
    case Architecture::GIN:
      return gin(tape, h, batch, params, layer);
    case Architecture::GATv2:
      return gatv2(tape, h, batch, params, layer);
    default:
      return film_family(tape, arch, h, batch, params, layer);
  }
}

Tape::NodeId forward_on_tape(Tape& tape, const ModelConfig& cfg,
                             const TapeParams& params,
                             const FeaturizedGraph& batch, bool training,
                             std::mt19937_64* dropout_rng) {
  if (batch.num_graphs == 0 || batch.num_nodes() == 0)
    throw EmptyBatch("forward: empty batch");
  if (batch.node_features.cols() != cfg.input_dim)
    throw ShapeMismatch("forward: feature width does not match input_dim");
  auto x = tape.leaf(batch.node_features);
  auto h = tape.add_bias(tape.matmul(x, params.at("proj.W")),
                         params.at("proj.b"));
  static std::mt19937_64 null_rng;  // never drawn from when !training
  std::mt19937_64& rng = dropout_rng ? *dropout_rng : null_rng;
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    h = graph_layer(tape, cfg.architecture, h, batch, params, l);
    if (l + 1 < cfg.num_layers) {
      std::string np = "norm" + std::to_string(l) + ".";
      h = tape.layer_norm(h, params.at(np + "gain"), params.at(np + "bias"));
      h = tape.dropout(h, cfg.dropout_rate, rng, training);
      h = tape.relu(h);
    }
  }
  auto pooled = tape.segment_mean(h, batch.graph_segment, batch.num_graphs);
  return tape.add_bias(tape.matmul(pooled, params.at("head.W")),
                       params.at("head.b"));
}

std::vector<double> forward(const ModelConfig& cfg, const ModelParams& params,
                            const FeaturizedGraph& batch) {
  Tape tape;
  TapeParams tp = register_params(tape, params);
  auto out = forward_on_tape(tape, cfg, tp, batch, false, nullptr);
  return tape.value(out).data;
}

}  // namespace dsd
