// SPDX-License-Identifier: Apache-2.0
#include "dsd/screening.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <tuple>

#include <json.hpp>

namespace dsd {

SplitDataset split_labeled(LabeledDataset labeled, double f_train, double f_val,
                           uint64_t seed) {
  if (!(f_train > 0) || !(f_val >= 0) || f_train + f_val > 1.0)
    throw BadInput("split_labeled: invalid split fractions");
  std::mt19937_64 rng(seed ^ 0x517cc1b727220a95ull);
  std::shuffle(labeled.begin(), labeled.end(), rng);
  std::size_t m = labeled.size();
  std::size_t n_val = std::size_t(std::llround(f_val * double(m)));
  std::size_t n_test =
      std::size_t(std::llround((1.0 - f_train - f_val) * double(m)));
  if (n_val == 0 && m >= 2) n_val = 1;
  std::size_t n_train = m - n_val - n_test;
  SplitDataset out;
  out.train.assign(labeled.begin(), labeled.begin() + long(n_train));
  out.val.assign(labeled.begin() + long(n_train),
                 labeled.begin() + long(n_train + n_val));
  out.test.assign(labeled.begin() + long(n_train + n_val), labeled.end());
  return out;
}

ScreeningResult run_dsd(const std::vector<MolecularGraph>& library,
                        const PipelineConfig& cfg,
                        const OracleParams& oracle_params) {
  std::size_t n = library.size();
  if (n < 1000) throw BadInput("run_dsd: library must hold at least 1000 molecules");
  if (!(cfg.rho > 0) || cfg.rho > 1 || !(cfg.sigma > 0) || cfg.sigma > 1)
    throw BadFraction("run_dsd: rho and sigma must lie in (0, 1]");

  CalibratedOracle oracle = calibrate_oracle(library, oracle_params);

  // featurize once; used for both training samples and full inference
  std::vector<FeaturizedGraph> features;
  features.reserve(n);
  for (const MolecularGraph& g : library)
    features.push_back(featurize(add_virtual_node(g)));

  // (1) sample ceil(rho*N) without replacement
  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  std::mt19937_64 sample_rng(cfg.seed ^ 0x2545f4914f6cdd1dull);
  std::shuffle(indices.begin(), indices.end(), sample_rng);
  std::size_t n_docked = std::size_t(std::ceil(cfg.rho * double(n)));
  indices.resize(n_docked);

  // (2) noisy docking labels, NaN rows dropped
  LabeledDataset labeled;
  for (std::size_t i : indices) {
    double score = oracle.dock(library[i]);
    if (std::isnan(score)) continue;
    labeled.push_back({features[i], score});
  }
  if (labeled.size() < 100)
    throw InsufficientData("run_dsd: fewer than 100 labeled samples after NaN drop");

  // (3)+(4) split and train (label standardization happens inside train)
  SplitDataset split =
      split_labeled(std::move(labeled), cfg.split_train, cfg.split_val, cfg.seed);
  ScreeningResult result;
  std::tie(result.checkpoint, result.history) =
      train(cfg.model, cfg.train, split.train, split.val);

  // (5) full-library inference
  auto t0 = std::chrono::steady_clock::now();
  result.predictions.reserve(n);
  std::size_t bs = cfg.train.batch_size;
  for (std::size_t start = 0; start < n; start += bs) {
    std::size_t end = std::min(start + bs, n);
    std::vector<const FeaturizedGraph*> graphs;
    for (std::size_t i = start; i < end; ++i) graphs.push_back(&features[i]);
    for (double v : predict(result.checkpoint, batch_graphs(graphs)))
      result.predictions.push_back(v);
  }
  result.t_inf_hours = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t0)
                           .count() /
                       3600.0;

  // (6)+(7) select the top sigma fraction and re-dock it
  result.selected = top_fraction(result.predictions, cfg.sigma);
  for (std::size_t i : result.selected) {
    double score = oracle.dock(library[i]);
    result.redocked.push_back(score);
    if (std::isnan(score)) ++result.nan_in_selection;
  }

  // (8) noise-free ground truth over the full library
  std::vector<double> truth(n);
  for (std::size_t i = 0; i < n; ++i)
    truth[i] = oracle.dock_noise_free(library[i]);

  // (9) metrics and timing
  result.report = build_metric_report(truth, result.predictions, {cfg.sigma},
                                      cfg.zeta_list, cfg.grid_points);
  result.surface = res_surface(truth, result.predictions, cfg.grid_points);
  result.t_dock_hours = cfg.t_dock_hours_per_molecule * double(n);
  result.speedup =
      compute_speedup(result.t_dock_hours, result.t_inf_hours, cfg.sigma);
  return result;
}

void save_screening_result(const ScreeningResult& result,
                           const std::vector<MolecularGraph>& library,
                           const std::string& outdir) {
  namespace fs = std::filesystem;
  fs::create_directories(outdir);
  char buf[256];

  {
    std::ofstream out(fs::path(outdir) / "predictions.csv");
    if (!out) throw FormatError("screening: cannot write predictions.csv");
    out << "index,smiles,pred_score\n";
    for (std::size_t i = 0; i < result.predictions.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%s,%.17g\n", i,
                    write_smiles(library[i]).c_str(), result.predictions[i]);
      out << buf;
    }
  }
  {
    std::ofstream out(fs::path(outdir) / "selection.csv");
    if (!out) throw FormatError("screening: cannot write selection.csv");
    out << "index,smiles,pred_score,dock_score\n";
    for (std::size_t r = 0; r < result.selected.size(); ++r) {
      std::size_t i = result.selected[r];
      std::snprintf(buf, sizeof buf, "%zu,%s,%.17g,%.17g\n", i,
                    write_smiles(library[i]).c_str(), result.predictions[i],
                    result.redocked[r]);
      out << buf;
    }
  }
  save_metric_report(result.report, (fs::path(outdir) / "report.json").string());
  save_res_csv(result.surface, (fs::path(outdir) / "res_surface.csv").string());
  save_history(result.history, (fs::path(outdir) / "history.csv").string());
  {
    nlohmann::json j;
    j["t_inf_hours"] = result.t_inf_hours;
    j["t_dock_hours"] = result.t_dock_hours;
    j["speedup"] = result.speedup;
    j["nan_in_selection"] = result.nan_in_selection;
    std::ofstream out(fs::path(outdir) / "timing.json");
    if (!out) throw FormatError("screening: cannot write timing.json");
    out << j.dump(2) << "\n";
  }
}

}  // namespace dsd
