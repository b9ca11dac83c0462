// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "dsd/screening.hpp"

using namespace dsd;

namespace {

std::vector<MolecularGraph> test_library(std::size_t n, uint64_t seed) {
  GeneratorParams gp;
  gp.seed = seed;
  gp.min_atoms = 6;
  gp.max_atoms = 16;
  return generate_random_library(gp, int(n));
}

PipelineConfig quick_config() {
  PipelineConfig cfg;
  cfg.rho = 0.15;
  cfg.sigma = 0.1;
  cfg.zeta_list = {0.01, 0.1};
  cfg.model.hidden_dim = 8;
  cfg.model.num_layers = 2;
  cfg.model.dropout_rate = 0.0;
  cfg.train.batch_size = 64;
  cfg.train.max_epochs = 4;
  cfg.train.seed = 3;
  cfg.seed = 3;
  cfg.grid_points = 10;
  return cfg;
}

}  // namespace

TEST_CASE("oracle raw score hand case") {
  MolecularGraph benzene = parse_smiles("c1ccccc1");
  OracleParams p;
  p.w_aromatic = 1;
  p.w_rings = 1;
  p.w_hetero = 0;
  p.w_mean_degree = 0;
  p.w_heavy = 0;
  CHECK(oracle_raw(benzene, p) == doctest::Approx(-7.0));

  p.noise_base = 0;
  p.noise_slope = 0;
  p.nan_fraction = 0;
  CalibratedOracle o{p, 0.0, 0.0};
  CHECK(o.dock(benzene) == doctest::Approx(-7.0));
  CHECK(o.dock(benzene) == o.dock(benzene));  // call-order independent
}

TEST_CASE("oracle determinism and structure keying") {
  OracleParams p;
  p.nan_fraction = 0;
  std::vector<MolecularGraph> lib = test_library(200, 9);
  CalibratedOracle o = calibrate_oracle(lib, p);
  for (int i = 0; i < 20; ++i)
    CHECK(o.dock(lib[std::size_t(i)]) == o.dock(lib[std::size_t(i)]));

  // isomorphic inputs written in different atom orders agree
  MolecularGraph a = parse_smiles("CCO");
  MolecularGraph b = parse_smiles("OCC");
  CHECK(o.dock_noise_free(a) == o.dock_noise_free(b));
  CHECK(structure_hash(a) == structure_hash(b));
  CHECK(o.dock(a) == o.dock(b));

  // different seeds give different noise
  OracleParams p2 = p;
  p2.seed = 1234;
  CalibratedOracle o2 = calibrate_oracle(lib, p2);
  CHECK(o.dock(lib[0]) != o2.dock(lib[0]));
}

TEST_CASE("nan injection") {
  OracleParams p;
  p.nan_fraction = 0.999999;  // invariant requires < 1
  std::vector<MolecularGraph> lib = test_library(100, 4);
  CalibratedOracle o = calibrate_oracle(lib, p);
  for (const MolecularGraph& g : lib) CHECK(std::isnan(o.dock(g)));

  p.nan_fraction = 0.0;
  CalibratedOracle o0 = calibrate_oracle(lib, p);
  for (const MolecularGraph& g : lib) CHECK(!std::isnan(o0.dock(g)));
}

TEST_CASE("oracle calibration") {
  OracleParams p;
  std::vector<MolecularGraph> lib = test_library(500, 6);
  CalibratedOracle o = calibrate_oracle(lib, p);
  // auto noise_base is a quarter of the raw-score spread
  std::vector<double> raws;
  for (const MolecularGraph& g : lib) raws.push_back(oracle_raw(g, p));
  double mean = 0;
  for (double r : raws) mean += r;
  mean /= double(raws.size());
  double var = 0;
  for (double r : raws) var += (r - mean) * (r - mean);
  double expected = 0.25 * std::sqrt(var / double(raws.size()));
  CHECK(o.noise_base == doctest::Approx(expected));
  // half the raws sit at or below the median
  std::size_t below = 0;
  for (double r : raws)
    if (r <= o.median_raw) ++below;
  CHECK(below >= raws.size() / 2);

  OracleParams fixed = p;
  fixed.noise_base = 0.5;
  CHECK(calibrate_oracle(lib, fixed).noise_base == 0.5);
}

TEST_CASE("speedup model") {
  CHECK(compute_speedup(1728, 9.167, 0.1) == doctest::Approx(9.496).epsilon(1e-4));
  CHECK(std::abs(compute_speedup(1728, 9.167, 0.1) - 9.496) < 0.001);
  CHECK(compute_speedup(100, 0, 1.0) == doctest::Approx(1.0));
  CHECK(compute_speedup(100, 0, 0.5) == doctest::Approx(2.0));
  CHECK_THROWS_AS(compute_speedup(0, 1, 0.5), BadInput);
  CHECK_THROWS_AS(compute_speedup(10, -1, 0.5), BadInput);
  CHECK_THROWS_AS(compute_speedup(10, 1, 0.0), BadInput);
}

TEST_CASE("split sizes and determinism") {
  LabeledDataset labeled(100);
  for (std::size_t i = 0; i < labeled.size(); ++i)
    labeled[i].label = double(i);
  SplitDataset s = split_labeled(labeled, 0.8, 0.1, 7);
  CHECK(s.train.size() == 80);
  CHECK(s.val.size() == 10);
  CHECK(s.test.size() == 10);
  SplitDataset s2 = split_labeled(labeled, 0.8, 0.1, 7);
  for (std::size_t i = 0; i < s.train.size(); ++i)
    CHECK(s.train[i].label == s2.train[i].label);
  // every label lands in exactly one partition
  std::vector<int> seen(100, 0);
  for (const auto& part : {s.train, s.val, s.test})
    for (const LabeledSample& x : part) seen[std::size_t(x.label)]++;
  for (int c : seen) CHECK(c == 1);
}

TEST_CASE("run_dsd with sigma 1 recalls everything") {
  std::vector<MolecularGraph> lib = test_library(1000, 77);
  PipelineConfig cfg = quick_config();
  cfg.sigma = 1.0;
  OracleParams op;
  op.nan_fraction = 0.0;
  ScreeningResult r = run_dsd(lib, cfg, op);
  CHECK(r.predictions.size() == 1000);
  CHECK(r.selected.size() == 1000);
  for (const MetricCell& c : r.report.cells) CHECK(c.recall == 1.0);
  CHECK(r.speedup ==
        doctest::Approx(compute_speedup(r.t_dock_hours, r.t_inf_hours, 1.0)));
}

TEST_CASE("run_dsd selection contract and determinism") {
  std::vector<MolecularGraph> lib = test_library(1000, 88);
  PipelineConfig cfg = quick_config();
  OracleParams op;
  ScreeningResult a = run_dsd(lib, cfg, op);
  CHECK(a.selected.size() == 100);  // ceil(0.1 * 1000)
  // P is exactly the stable top-k of the predictions
  CHECK(a.selected == top_fraction(a.predictions, cfg.sigma));
  CHECK(a.redocked.size() == a.selected.size());

  ScreeningResult b = run_dsd(lib, cfg, op);
  CHECK(a.predictions == b.predictions);  // bit-identical
  CHECK(a.report.res_score == b.report.res_score);
  CHECK(a.redocked.size() == b.redocked.size());
  for (std::size_t i = 0; i < a.redocked.size(); ++i) {
    if (std::isnan(a.redocked[i]))
      CHECK(std::isnan(b.redocked[i]));
    else
      CHECK(a.redocked[i] == b.redocked[i]);
  }
}

TEST_CASE("run_dsd input validation") {
  std::vector<MolecularGraph> tiny = test_library(50, 5);
  PipelineConfig cfg = quick_config();
  OracleParams op;
  CHECK_THROWS_AS(run_dsd(tiny, cfg, op), BadInput);

  std::vector<MolecularGraph> lib = test_library(1000, 6);
  OracleParams mostly_nan;
  mostly_nan.nan_fraction = 0.99;
  CHECK_THROWS_AS(run_dsd(lib, cfg, mostly_nan), InsufficientData);

  PipelineConfig bad = cfg;
  bad.sigma = 0.0;
  CHECK_THROWS_AS(run_dsd(lib, bad, op), BadFraction);
}

TEST_CASE("screening artifacts on disk") {
  std::vector<MolecularGraph> lib = test_library(1000, 99);
  PipelineConfig cfg = quick_config();
  OracleParams op;
  ScreeningResult r = run_dsd(lib, cfg, op);
  std::string dir = "screen_out_test";
  save_screening_result(r, lib, dir);
  for (const char* name : {"predictions.csv", "selection.csv", "report.json",
                           "res_surface.csv", "history.csv", "timing.json"})
    CHECK(std::filesystem::exists(std::filesystem::path(dir) / name));
  std::ifstream in(std::filesystem::path(dir) / "predictions.csv");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 1001);
  std::filesystem::remove_all(dir);
}
