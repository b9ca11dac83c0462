// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "dsd/metrics.hpp"
#include "dsd/molgraph.hpp"
#include "dsd/training.hpp"

namespace dsd {

struct OracleParams {
  double w_aromatic = 1.0;
  double w_rings = 2.0;
  double w_hetero = 1.5;
  double w_mean_degree = 0.5;
  double w_heavy = 0.1;
  double noise_base = -1.0;  // negative requests 0.25*std(raw) at calibration
  double noise_slope = 0.1;  // extra noise per unit of raw above the median
  double nan_fraction = 0.01;
  uint64_t seed = 0;
};

// Noise-free structural score: -(w1*aromatic + w2*rings + w3*hetero +
// w4*mean_degree + w5*heavy). Lower is better.
double oracle_raw(const MolecularGraph& g, const OracleParams& p);

// Oracle with the noise model resolved against a concrete library. The noise
// stream is keyed by the canonical structure hash, not call order.
struct CalibratedOracle {
  OracleParams params;
  double median_raw = 0.0;
  double noise_base = 0.0;

  // noisy score, NaN with probability nan_fraction
  double dock(const MolecularGraph& g) const;
  double dock_noise_free(const MolecularGraph& g) const;
};

CalibratedOracle calibrate_oracle(const std::vector<MolecularGraph>& library,
                                  const OracleParams& p);

struct PipelineConfig {
  double rho = 0.1;    // fraction of the library docked for training labels
  double sigma = 0.1;  // fraction re-docked after surrogate ranking
  std::vector<double> zeta_list = {0.01};
  double split_train = 0.8, split_val = 0.1, split_test = 0.1;
  ModelConfig model;
  TrainConfig train;
  uint64_t seed = 0;
  std::size_t grid_points = 50;
  double t_dock_hours_per_molecule = 0.01;  // modeled classical docking cost
};

struct SplitDataset {
  LabeledDataset train, val, test;
};

SplitDataset split_labeled(LabeledDataset labeled, double f_train,
                           double f_val, uint64_t seed);

struct ScreeningResult {
  std::vector<double> predictions;    // surrogate scores over all N
  std::vector<std::size_t> selected;  // P, ceil(sigma*N) indices
  std::vector<double> redocked;       // oracle scores of P (may hold NaN)
  std::size_t nan_in_selection = 0;
  MetricReport report;   // against the noise-free ground truth
  ResSurface surface;
  ModelCheckpoint checkpoint;
  TrainHistory history;
  double t_inf_hours = 0.0;
  double t_dock_hours = 0.0;  // modeled full-library docking cost
  double speedup = 0.0;
};

// Full pipeline: sample ceil(rho*N) molecules, dock them (drop NaN), split
// 80-10-10, train the surrogate, infer over all N, re-dock the predicted
// top sigma fraction, and evaluate against noise-free ground truth.
ScreeningResult run_dsd(const std::vector<MolecularGraph>& library,
                        const PipelineConfig& cfg,
                        const OracleParams& oracle_params);

// t_D / (t_inf + sigma * t_D); all times in hours.
double compute_speedup(double t_dock, double t_inf, double sigma);

// predictions.csv, selection.csv, report.json, res_surface.csv plus a
// separate timing.json (kept apart so data files are run-to-run identical).
void save_screening_result(const ScreeningResult& result,
                           const std::vector<MolecularGraph>& library,
                           const std::string& outdir);

}  // namespace dsd
