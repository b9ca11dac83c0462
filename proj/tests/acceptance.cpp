// SPDX-License-Identifier: Apache-2.0
// Release gate: ten criteria, one pass/fail line each. Exit 0 only when all
// pass. Usage: acceptance [--data-dir tests/data]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dsd/screening.hpp"

using namespace dsd;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("criterion %2d %-34s %s%s%s\n", id, name.c_str(),
              ok ? "pass" : "FAIL", detail.empty() ? "" : "  ", detail.c_str());
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

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

double run_layer_1d(Architecture arch, double hv, double hu, double wg,
                    double wa, double wb) {
  ModelParams p;
  p["layer0.rel0.Wg"] = Tensor({1, 1}, {wg});
  p["layer0.rel0.Wa"] = Tensor({1, 1}, {wa});
  p["layer0.rel0.Wb"] = Tensor({1, 1}, {wb});
  Tape t;
  TapeParams tp = register_params(t, p);
  auto h = t.leaf(Tensor({2, 1}, {hv, hu}));
  return t.value(graph_layer(t, arch, h, single_edge_topology(), tp, 0)).data[0];
}

FeaturizedGraph random_small_graph(uint64_t seed) {
  GeneratorParams gp;
  gp.seed = seed;
  gp.min_atoms = 6;
  gp.max_atoms = 6;
  return featurize(add_virtual_node(generate_random_library(gp, 1)[0]));
}

// --- criteria -------------------------------------------------------------

void criterion_speedup() {
  double s = compute_speedup(1728, 9.167, 0.1);
  report(1, "speedup closed-form value", std::abs(s - 9.496) <= 0.001,
         fmt("speedup=%.4f", s));
}

void criterion_gradients() {
  auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::string worst_arch;
  for (Architecture arch :
       {Architecture::FiLM, Architecture::FiLMv2, Architecture::FiLMv2Tanh,
        Architecture::FiLMv2SourceAct, Architecture::GIN,
        Architecture::GATv2}) {
    ModelConfig cfg;
    cfg.architecture = arch;
    cfg.hidden_dim = 3;
    cfg.num_layers = 2;
    cfg.dropout_rate = 0.0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
      ModelParams params = init_params(cfg, 100 + seed);
      FeaturizedGraph f = random_small_graph(500 + seed);
      std::vector<std::string> names;
      std::vector<Tensor> values;
      for (const auto& [k, v] : params) {
        names.push_back(k);
        values.push_back(v);
      }
      auto build = [&cfg, &names, &f](Tape& t,
                                      const std::vector<Tape::NodeId>& ids) {
        TapeParams tp;
        for (std::size_t i = 0; i < names.size(); ++i) tp.ids[names[i]] = ids[i];
        auto out = forward_on_tape(t, cfg, tp, f, false, nullptr);
        return t.sum(t.mul(out, out));
      };
      double err = check_gradients(build, values, 1e-5);
      if (err > worst) {
        worst = err;
        worst_arch = architecture_name(arch);
      }
    }
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  report(2, "gradient suite, 6 archs x 20 seeds", worst < 1e-4 && secs < 60.0,
         fmt("max rel err=%.2e, %.1fs, worst in ", worst, secs) + worst_arch);
}

void criterion_filtering() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int zeros = 0;
  for (int trial = 0; trial < 100; ++trial)
    if (run_layer_1d(Architecture::FiLMv2, 1.0, u(rng), -0.8, u(rng), -0.3) ==
        0.0)
      ++zeros;
  report(3, "filmv2 filtering, exact zeros", zeros == 100,
         fmt("%.0f/100", double(zeros)));
}

void criterion_hand_case() {
  double film = run_layer_1d(Architecture::FiLM, 1, 2, -1, 3, 0.5);
  double v2 = run_layer_1d(Architecture::FiLMv2, 1, 2, -1, 3, 0.5);
  report(4, "film vs filmv2 hand case",
         std::abs(film - 0.0) < 1e-12 && std::abs(v2 - 0.5) < 1e-12,
         fmt("film=%.2e filmv2-0.5=%.2e", std::abs(film), std::abs(v2 - 0.5)));
}

void criterion_permutation() {
  ModelConfig cfg;
  cfg.hidden_dim = 8;
  cfg.num_layers = 2;
  cfg.dropout_rate = 0.0;
  ModelParams params = init_params(cfg, 11);
  std::mt19937_64 rng(123);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    GeneratorParams gp;
    gp.seed = 2000 + uint64_t(trial);
    gp.min_atoms = 5;
    gp.max_atoms = 12;
    FeaturizedGraph f =
        featurize(add_virtual_node(generate_random_library(gp, 1)[0]));
    double base = forward(cfg, params, f)[0];
    std::size_t n = f.num_nodes();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int rep = 0; rep < 5; ++rep) {
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
      worst = std::max(worst, std::abs(forward(cfg, params, pf)[0] - base));
    }
  }
  report(5, "permutation invariance 100x5", worst < 1e-9,
         fmt("max dev=%.2e", worst));
}

void criterion_metric_oracles() {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool ok = true;
  std::string detail;

  // perfect predictor
  std::vector<double> y(2000);
  for (double& v : y) v = u(rng);
  ok &= res_surface(y, y).res_score == 1.0;
  ok &= aurtc(rtc(y, y, 0.01)) == 1.0;
  for (auto [s, z] : {std::pair{0.1, 0.01}, {0.5, 0.5}, {1.0, 0.001}})
    ok &= recall_at(y, y, s, z) == 1.0;
  if (!ok) detail = "perfect-predictor identities";

  // random predictor mean recall
  double total = 0.0;
  std::vector<double> yt(10000), yp(10000);
  for (int trial = 0; trial < 1000; ++trial) {
    for (double& v : yt) v = u(rng);
    for (double& v : yp) v = u(rng);
    total += recall_at(yt, yp, 0.1, 0.01);
  }
  double mean = total / 1000.0;
  if (std::abs(mean - 0.10) > 0.01) {
    ok = false;
    detail = fmt("random mean=%.4f", mean);
  }

  // exhaustive oracle on small instances, ties included
  std::uniform_int_distribution<int> size_dist(1, 50);
  for (int trial = 0; trial < 10000 && ok; ++trial) {
    int n = size_dist(rng);
    std::vector<double> t(static_cast<std::size_t>(n));
    std::vector<double> p(static_cast<std::size_t>(n));
    for (double& v : t) v = std::floor(u(rng) * 8);
    for (double& v : p) v = std::floor(u(rng) * 8);
    double sigma = u(rng), zeta = u(rng);
    if (sigma <= 0 || zeta <= 0) continue;
    std::size_t ks = std::size_t(std::ceil(sigma * n));
    std::size_t kz = std::size_t(std::ceil(zeta * n));
    auto top_set = [n](const std::vector<double>& v, std::size_t k) {
      std::vector<std::size_t> idx(static_cast<std::size_t>(n));
      std::iota(idx.begin(), idx.end(), 0);
      std::stable_sort(idx.begin(), idx.end(), [&v](std::size_t a, std::size_t b) {
        return v[a] < v[b];
      });
      return std::set<std::size_t>(idx.begin(), idx.begin() + long(k));
    };
    std::set<std::size_t> st = top_set(t, kz), sp = top_set(p, ks);
    std::size_t overlap = 0;
    for (std::size_t i : st) overlap += sp.count(i);
    double expected = double(overlap) / double(kz);
    if (recall_at(t, p, sigma, zeta) != expected) {
      ok = false;
      detail = fmt("exhaustive mismatch at trial %.0f", double(trial));
    }
  }
  report(6, "metric oracles", ok, detail.empty() ? fmt("random mean=%.4f", mean)
                                                 : detail);
}

void criterion_loss() {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> gauss(0.0, 1.0);
  bool ok = true;
  for (int batch = 0; batch < 100 && ok; ++batch) {
    std::size_t n = 1 + std::size_t(rng() % 64);
    std::vector<double> z(n), y(n);
    for (double& v : z) v = gauss(rng);
    for (double& v : y) v = gauss(rng);
    double mse = 0.0;
    for (std::size_t i = 0; i < n; ++i) mse += (z[i] - y[i]) * (z[i] - y[i]);
    mse /= double(n);
    if (wmse_loss(z, y, 0.0) != mse) ok = false;
  }
  double single = wmse_loss({0.0}, {-1.0}, 0.8);
  double dev = std::abs(single - std::exp(0.8));
  ok &= dev < 1e-9;
  report(7, "w-mse: alpha=0 bitwise mse, hand case", ok,
         fmt("single-sample dev=%.2e", dev));
}

void criterion_parser(const fs::path& data_dir) {
  std::ifstream in(data_dir / "smiles_reference.csv");
  bool ok = bool(in);
  std::string line, detail = "missing reference table";
  std::size_t rows = 0, mismatches = 0;
  if (ok) {
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string smiles, field;
      std::getline(ss, smiles, ',');
      std::vector<long> want;
      while (std::getline(ss, field, ',')) want.push_back(std::stol(field));
      MolecularGraph g = parse_smiles(smiles);
      long aromatic = 0, hydrogens = 0, charge = 0;
      for (const Atom& a : g.atoms) {
        aromatic += a.is_aromatic;
        hydrogens += a.total_h();
        charge += a.formal_charge;
      }
      std::vector<long> got = {long(g.num_atoms()), long(g.bonds.size()),
                               cycle_count(g), aromatic, hydrogens, charge};
      ++rows;
      if (want != got) {
        ++mismatches;
        if (mismatches == 1) detail = "first mismatch: " + smiles;
      }
    }
    ok = rows >= 200 && mismatches == 0;
    if (ok) detail = fmt("%.0f corpus rows", double(rows));
  }

  GeneratorParams gp;
  gp.seed = 404;
  std::size_t bad = 0;
  for (const MolecularGraph& g : generate_random_library(gp, 10000))
    if (!same_structure(g, parse_smiles(write_smiles(g)))) ++bad;
  if (bad > 0) {
    ok = false;
    detail += fmt(", %.0f round-trip failures", double(bad));
  }
  report(8, "parser conformance + round trip", ok, detail);
}

struct EndToEnd {
  ScreeningResult result;
  double recall = -1.0;
};

EndToEnd run_end_to_end(const std::vector<MolecularGraph>& library,
                        double alpha) {
  PipelineConfig cfg;
  cfg.rho = 0.1;
  cfg.sigma = 0.1;
  cfg.zeta_list = {0.01};
  cfg.model.architecture = Architecture::FiLMv2;
  cfg.model.hidden_dim = 64;
  cfg.model.num_layers = 4;
  cfg.model.dropout_rate = 0.1;
  cfg.train.alpha = alpha;
  cfg.train.max_epochs = 120;
  cfg.train.early_stop_patience = 30;
  cfg.train.batch_size = 128;
  cfg.seed = 7;
  OracleParams oracle;
  oracle.seed = 7;
  EndToEnd out;
  out.result = run_dsd(library, cfg, oracle);
  for (const MetricCell& cell : out.result.report.cells)
    if (std::abs(cell.sigma - 0.1) < 1e-12 && std::abs(cell.zeta - 0.01) < 1e-12)
      out.recall = cell.recall;
  return out;
}

void criteria_end_to_end(const std::vector<MolecularGraph>& library) {
  auto t0 = std::chrono::steady_clock::now();
  EndToEnd weighted = run_end_to_end(library, 0.8);
  EndToEnd unweighted = run_end_to_end(library, 0.0);
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  bool ok9 = weighted.recall >= 0.5 &&
             unweighted.recall <= weighted.recall + 0.05 && secs < 1800.0;
  report(9, "end-to-end recall, n=20000", ok9,
         fmt("R(a=0.8)=%.3f R(a=0)=%.3f %.0fs", weighted.recall,
             unweighted.recall, secs));

  EndToEnd repeat = run_end_to_end(library, 0.8);
  fs::path base = fs::temp_directory_path() / "dsd_acceptance";
  fs::remove_all(base);
  save_screening_result(weighted.result, library, (base / "a").string());
  save_screening_result(repeat.result, library, (base / "b").string());
  auto same_bytes = [&base](const char* name) {
    std::ifstream fa(base / "a" / name, std::ios::binary);
    std::ifstream fb(base / "b" / name, std::ios::binary);
    std::string a((std::istreambuf_iterator<char>(fa)),
                  std::istreambuf_iterator<char>());
    std::string b((std::istreambuf_iterator<char>(fb)),
                  std::istreambuf_iterator<char>());
    return !a.empty() && a == b;
  };
  bool ok10 = same_bytes("predictions.csv") && same_bytes("report.json");
  report(10, "determinism, byte-identical rerun", ok10, "");
  fs::remove_all(base);
}

}  // namespace

int main(int argc, char** argv) {
  fs::path data_dir = "tests/data";
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--data-dir") data_dir = argv[i + 1];

  criterion_speedup();
  criterion_gradients();
  criterion_filtering();
  criterion_hand_case();
  criterion_permutation();
  criterion_metric_oracles();
  criterion_loss();
  criterion_parser(data_dir);

  GeneratorParams gp;
  gp.seed = 42;
  criteria_end_to_end(generate_random_library(gp, 20000));

  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", g_failures);
  return 1;
}
