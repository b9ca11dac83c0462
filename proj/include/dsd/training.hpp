// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsd/gnn.hpp"

namespace dsd {

struct LabeledSample {
  FeaturizedGraph graph;
  double label = 0.0;  // oracle docking score, finite
};

using LabeledDataset = std::vector<LabeledSample>;

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t batch_size = 128;
  std::size_t max_epochs = 300;
  double alpha = 0.8;  // W-MSE exponential coefficient
  uint64_t seed = 0;
  std::size_t early_stop_patience = 50;  // 0 disables early stopping
};

struct ModelCheckpoint {
  ModelConfig model;
  ModelParams params;
  double label_mean = 0.0;
  double label_std = 1.0;
  TrainConfig train_config;
  double best_val_loss = 0.0;
  std::size_t epoch_of_best = 0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_wmse = 0.0;
  double val_wmse = 0.0;
  double seconds = 0.0;
};

using TrainHistory = std::vector<EpochRecord>;

// Mean-reduced W-MSE: (1/n) sum e^{-alpha*y_i} (z_i - y_i)^2 over
// standardized labels y. alpha = 0 reduces to plain MSE.
double wmse_loss(const std::vector<double>& z, const std::vector<double>& y,
                 double alpha);

// Same loss as a tape node; z is [n x 1], y the standardized labels.
Tape::NodeId wmse_loss_on_tape(Tape& tape, Tape::NodeId z,
                               const std::vector<double>& y, double alpha);

struct LabelStats {
  double mean = 0.0;
  double std = 1.0;  // population std of the train split
};

LabelStats standardize_labels(const std::vector<double>& train_labels);
double standardize(double y, const LabelStats& s);
double destandardize(double z, const LabelStats& s);

// Adam state per parameter tensor, addressed like ModelParams.
struct AdamState {
  std::map<std::string, Tensor> m, v;
  std::size_t t = 0;
};

void adam_step(ModelParams& params, const std::map<std::string, Tensor>& grads,
               AdamState& state, double lr, double beta1 = 0.9,
               double beta2 = 0.999, double eps = 1e-8);

// Full training loop: standardizes labels from the train split, shuffles each
// epoch with a seeded RNG, evaluates validation W-MSE with dropout disabled,
// and keeps the parameters of the best validation epoch. Deterministic given
// the seed.
std::pair<ModelCheckpoint, TrainHistory> train(const ModelConfig& model_cfg,
                                               const TrainConfig& train_cfg,
                                               const LabeledDataset& train_set,
                                               const LabeledDataset& val_set);

// Destandardized model scores for a batch.
std::vector<double> predict(const ModelCheckpoint& ckpt,
                            const FeaturizedGraph& batch);

void save_checkpoint(const ModelCheckpoint& ckpt, const std::string& path);
ModelCheckpoint load_checkpoint(const std::string& path);

void save_history(const TrainHistory& history, const std::string& path);

}  // namespace dsd
