// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dsd/gnn.hpp"
#include "dsd/molgraph.hpp"

using namespace dsd;

namespace {

// two nodes, one directed edge node1 -> node0, relation 0, no self loops
FeaturizedGraph single_edge_topology() {
  FeaturizedGraph f;
  f.node_features = Tensor::zeros({2, 48});
  f.edge_src = {1};
  f.edge_tgt = {0};
  f.edge_relation = {0};
  f.graph_segment = {0, 0};
  f.num_graphs = 1;
  return f;
}

ModelParams one_dim_layer_params(double wg, double wa, double wb) {
  ModelParams p;
  p["layer0.rel0.Wg"] = Tensor({1, 1}, {wg});
  p["layer0.rel0.Wa"] = Tensor({1, 1}, {wa});
  p["layer0.rel0.Wb"] = Tensor({1, 1}, {wb});
  return p;
}

double run_layer_1d(Architecture arch, double hv, double hu, double wg,
                    double wa, double wb) {
  Tape t;
  TapeParams tp = register_params(t, one_dim_layer_params(wg, wa, wb));
  auto h = t.leaf(Tensor({2, 1}, {hv, hu}));
  auto out = graph_layer(t, arch, h, single_edge_topology(), tp, 0);
  return t.value(out).data[0];
}

std::vector<Tensor> param_values(const ModelParams& p) {
  std::vector<Tensor> out;
  for (const auto& [k, v] : p) out.push_back(v);
  return out;
}

GraphBuilder model_loss_builder(const ModelConfig& cfg, const ModelParams& p,
                                const FeaturizedGraph& batch) {
  std::vector<std::string> names;
  for (const auto& [k, v] : p) names.push_back(k);
  return [cfg, names, batch](Tape& t, const std::vector<Tape::NodeId>& ids) {
    TapeParams tp;
    for (std::size_t i = 0; i < names.size(); ++i) tp.ids[names[i]] = ids[i];
    auto out = forward_on_tape(t, cfg, tp, batch, false, nullptr);
    return t.sum(t.mul(out, out));
  };
}

FeaturizedGraph random_test_graph(uint64_t seed, bool virtual_node = true) {
  GeneratorParams gp;
  gp.seed = seed;
  gp.min_atoms = 5;
  gp.max_atoms = 6;
  MolecularGraph g = generate_random_library(gp, 1)[0];
  return featurize(virtual_node ? add_virtual_node(g) : g);
}

}  // namespace

TEST_CASE("film vs filmv2 hand case") {
  // h_v=1, h_u=2, Wg=-1, Wa=3, Wb=0.5
  CHECK(run_layer_1d(Architecture::FiLM, 1, 2, -1, 3, 0.5) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(run_layer_1d(Architecture::FiLMv2, 1, 2, -1, 3, 0.5) ==
        doctest::Approx(0.5).epsilon(1e-12));
  // source_act: relu around Wa*h_u=6 changes nothing, multiplier is still 0
  CHECK(run_layer_1d(Architecture::FiLMv2SourceAct, 1, 2, -1, 3, 0.5) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("zero weights give zero output") {
  for (Architecture a : {Architecture::FiLM, Architecture::FiLMv2,
                         Architecture::FiLMv2Tanh})
    CHECK(run_layer_1d(a, 1.7, -0.3, 0, 0, 0) == 0.0);
}

TEST_CASE("tanh variant maps zero input to zero") {
  CHECK(run_layer_1d(Architecture::FiLMv2Tanh, 0, 0, 0.4, -0.7, 0.2) == 0.0);
}

TEST_CASE("film equals filmv2 on the all-non-negative construction") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    double hv = u(rng), hu = u(rng), wg = u(rng), wa = u(rng), wb = u(rng);
    double film = run_layer_1d(Architecture::FiLM, hv, hu, wg, wa, wb);
    double v2 = run_layer_1d(Architecture::FiLMv2, hv, hu, wg, wa, wb);
    CHECK(std::abs(film - v2) < 1e-12);
  }
}

TEST_CASE("source_act equals filmv2 when source term is non-negative") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    double hv = u(rng) - 0.5, hu = u(rng), wa = u(rng), wg = u(rng) - 0.5,
           wb = u(rng) - 0.5;
    // wa, hu >= 0 so Wa*h_u >= 0
    double v2 = run_layer_1d(Architecture::FiLMv2, hv, hu, wg, wa, wb);
    double sa = run_layer_1d(Architecture::FiLMv2SourceAct, hv, hu, wg, wa, wb);
    CHECK(sa == doctest::Approx(v2).epsilon(1e-12));
  }
}

TEST_CASE("filmv2 filtering: negative gamma and beta rows zero the feature") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    // h_v = 1 (fixed positive), Wg maps it negative, Wb non-positive
    double out = run_layer_1d(Architecture::FiLMv2, 1.0, u(rng), -0.8, u(rng),
                              -0.3);
    CHECK(out == 0.0);
  }
}

TEST_CASE("isolated node sees only its self-loop") {
  // one node with a single self-loop edge of relation 5
  FeaturizedGraph f;
  f.node_features = Tensor::zeros({1, 48});
  f.edge_src = {0};
  f.edge_tgt = {0};
  f.edge_relation = {5};
  f.graph_segment = {0};
  ModelParams p;
  p["layer0.rel5.Wg"] = Tensor({1, 1}, {0.5});
  p["layer0.rel5.Wa"] = Tensor({1, 1}, {2.0});
  p["layer0.rel5.Wb"] = Tensor({1, 1}, {-1.0});
  Tape t;
  TapeParams tp = register_params(t, p);
  auto h = t.leaf(Tensor({1, 1}, {3.0}));
  auto out = graph_layer(t, Architecture::FiLMv2, h, f, tp, 0);
  // relu(relu(1.5)*6 + relu(-3)) = 9
  CHECK(t.value(out).data[0] == doctest::Approx(9.0));
}

TEST_CASE("gin star-graph hand case") {
  FeaturizedGraph f;
  f.node_features = Tensor::zeros({4, 48});
  f.edge_src = {1, 2, 3};
  f.edge_tgt = {0, 0, 0};
  f.edge_relation = {0, 0, 0};
  f.graph_segment = {0, 0, 0, 0};
  ModelParams p;
  p["layer0.rel0.W"] = Tensor({1, 1}, {1.0});
  p["layer0.eps"] = Tensor({1}, {0.0});
  p["layer0.mlp.W1"] = Tensor({1, 1}, {1.0});
  p["layer0.mlp.b1"] = Tensor({1}, {0.0});
  p["layer0.mlp.W2"] = Tensor({1, 1}, {1.0});
  p["layer0.mlp.b2"] = Tensor({1}, {0.0});
  Tape t;
  TapeParams tp = register_params(t, p);
  auto h = t.leaf(Tensor({4, 1}, {0.5, 1, 2, 3}));
  auto out = graph_layer(t, Architecture::GIN, h, f, tp, 0);
  CHECK(t.value(out).data[0] == doctest::Approx(0.5 + 6.0));

  // zero MLP weights kill the output
  p["layer0.mlp.W2"] = Tensor({1, 1}, {0.0});
  Tape t2;
  TapeParams tp2 = register_params(t2, p);
  auto out2 = graph_layer(t2, Architecture::GIN, t2.leaf(Tensor({4, 1}, {0.5, 1, 2, 3})),
                          f, tp2, 0);
  for (double v : t2.value(out2).data) CHECK(v == 0.0);
}

TEST_CASE("gatv2 attention basics") {
  // one incoming edge: attention exactly 1, output = Ws*h_u
  FeaturizedGraph f = single_edge_topology();
  ModelParams p;
  p["layer0.rel0.Ws"] = Tensor({1, 1}, {2.0});
  p["layer0.rel0.Wt"] = Tensor({1, 1}, {-0.7});
  p["layer0.att"] = Tensor({1, 1}, {1.3});
  Tape t;
  TapeParams tp = register_params(t, p);
  auto h = t.leaf(Tensor({2, 1}, {1.0, 3.0}));
  auto out = graph_layer(t, Architecture::GATv2, h, f, tp, 0);
  CHECK(t.value(out).data[0] == doctest::Approx(6.0));

  // two neighbors with identical states: uniform attention 1/2
  FeaturizedGraph f2;
  f2.node_features = Tensor::zeros({3, 48});
  f2.edge_src = {1, 2};
  f2.edge_tgt = {0, 0};
  f2.edge_relation = {0, 0};
  f2.graph_segment = {0, 0, 0};
  Tape t2;
  TapeParams tp2 = register_params(t2, p);
  auto h2 = t2.leaf(Tensor({3, 1}, {1.0, 3.0, 3.0}));
  auto out2 = graph_layer(t2, Architecture::GATv2, h2, f2, tp2, 0);
  CHECK(t2.value(out2).data[0] == doctest::Approx(6.0));  // mean of equal messages
}

TEST_CASE("forward permutation invariance") {
  ModelConfig cfg;
  cfg.hidden_dim = 8;
  cfg.num_layers = 2;
  cfg.dropout_rate = 0.0;
  ModelParams params = init_params(cfg, 11);
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 10; ++trial) {
    FeaturizedGraph f = random_test_graph(1000 + uint64_t(trial));
    double base = forward(cfg, params, f)[0];
    std::size_t n = f.num_nodes();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int rep = 0; rep < 3; ++rep) {
      std::shuffle(perm.begin(), perm.end(), rng);
      FeaturizedGraph pf = f;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < 48; ++j)
          pf.node_features.data[std::size_t(perm[i]) * 48 + j] =
              f.node_features.data[i * 48 + j];
      for (std::size_t e = 0; e < f.num_edges(); ++e) {
        pf.edge_src[e] = perm[std::size_t(f.edge_src[e])];
        pf.edge_tgt[e] = perm[std::size_t(f.edge_tgt[e])];
      }
      CHECK(std::abs(forward(cfg, params, pf)[0] - base) < 1e-9);
    }
  }
}

TEST_CASE("batching equivalence and determinism") {
  ModelConfig cfg;
  cfg.hidden_dim = 8;
  cfg.num_layers = 2;
  cfg.dropout_rate = 0.1;  // must not fire in evaluation mode
  ModelParams params = init_params(cfg, 3);
  FeaturizedGraph a = random_test_graph(1);
  FeaturizedGraph b = random_test_graph(2);
  FeaturizedGraph batch = batch_graphs({&a, &b, &a});
  auto scores = forward(cfg, params, batch);
  REQUIRE(scores.size() == 3);
  CHECK(std::abs(scores[0] - forward(cfg, params, a)[0]) < 1e-9);
  CHECK(std::abs(scores[1] - forward(cfg, params, b)[0]) < 1e-9);
  // copies at different row offsets can differ in the last simd-dependent bits
  CHECK(std::abs(scores[0] - scores[2]) < 1e-12);
  CHECK(forward(cfg, params, batch) == scores);  // bit-identical repeat
}

TEST_CASE("end-to-end gradient check for all six architectures") {
  for (Architecture arch :
       {Architecture::FiLM, Architecture::FiLMv2, Architecture::FiLMv2Tanh,
        Architecture::FiLMv2SourceAct, Architecture::GIN,
        Architecture::GATv2}) {
    ModelConfig cfg;
    cfg.architecture = arch;
    cfg.hidden_dim = 3;
    cfg.num_layers = 2;
    cfg.dropout_rate = 0.0;
    ModelParams params = init_params(cfg, 17);
    FeaturizedGraph f = random_test_graph(55);
    double err = check_gradients(model_loss_builder(cfg, params, f),
                                 param_values(params), 1e-5);
    CHECK_MESSAGE(err < 1e-4, architecture_name(arch), " max rel err ", err);
  }
}

TEST_CASE("forward rejects empty batches") {
  ModelConfig cfg;
  cfg.hidden_dim = 4;
  cfg.num_layers = 1;
  ModelParams params = init_params(cfg, 1);
  FeaturizedGraph empty;
  empty.num_graphs = 0;
  Tape t;
  TapeParams tp = register_params(t, params);
  CHECK_THROWS_AS(forward_on_tape(t, cfg, tp, empty, false, nullptr),
                  EmptyBatch);
}
