// SPDX-License-Identifier: Apache-2.0
#include "dsd/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace dsd {

double wmse_loss(const std::vector<double>& z, const std::vector<double>& y,
                 double alpha) {
  if (z.empty() || z.size() != y.size())
    throw EmptyBatch("wmse_loss: need equal, non-empty prediction/label lists");
  double acc = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    double d = z[i] - y[i];
    acc += std::exp(-alpha * y[i]) * (d * d);
  }
  return acc / double(z.size());
}

Tape::NodeId wmse_loss_on_tape(Tape& tape, Tape::NodeId z,
                               const std::vector<double>& y, double alpha) {
  std::size_t n = y.size();
  if (n == 0 || tape.value(z).numel() != n)
    throw EmptyBatch("wmse_loss: need equal, non-empty prediction/label lists");
  Tensor neg_y = Tensor::zeros({n, 1});
  Tensor w = Tensor::zeros({n, 1});
  for (std::size_t i = 0; i < n; ++i) {
    neg_y.data[i] = -y[i];
    w.data[i] = std::exp(-alpha * y[i]);
  }
  auto diff = tape.add(z, tape.leaf(std::move(neg_y)));
  auto weighted = tape.mul(tape.mul(diff, diff), tape.leaf(std::move(w)));
  return tape.scale(tape.sum(weighted), 1.0 / double(n));
}

LabelStats standardize_labels(const std::vector<double>& train_labels) {
  if (train_labels.size() < 2)
    throw DegenerateLabels("standardize_labels: need at least 2 labels");
  double mean = std::accumulate(train_labels.begin(), train_labels.end(), 0.0) /
                double(train_labels.size());
  double var = 0;
  for (double y : train_labels) var += (y - mean) * (y - mean);
  var /= double(train_labels.size());  // population variance
  if (var == 0.0)
    throw DegenerateLabels("standardize_labels: zero label variance");
  return LabelStats{mean, std::sqrt(var)};
}

double standardize(double y, const LabelStats& s) { return (y - s.mean) / s.std; }
double destandardize(double z, const LabelStats& s) { return z * s.std + s.mean; }

void adam_step(ModelParams& params, const std::map<std::string, Tensor>& grads,
               AdamState& state, double lr, double beta1, double beta2,
               double eps) {
  state.t += 1;
  double bc1 = 1.0 - std::pow(beta1, double(state.t));
  double bc2 = 1.0 - std::pow(beta2, double(state.t));
  for (auto& [name, p] : params) {
    auto git = grads.find(name);
    if (git == grads.end()) continue;
    const Tensor& g = git->second;
    if (!g.same_shape(p))
      throw ShapeMismatch("adam_step: gradient shape mismatch for " + name);
    Tensor& m = state.m.try_emplace(name, Tensor::zeros(p.shape)).first->second;
    Tensor& v = state.v.try_emplace(name, Tensor::zeros(p.shape)).first->second;
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      m.data[i] = beta1 * m.data[i] + (1.0 - beta1) * g.data[i];
      v.data[i] = beta2 * v.data[i] + (1.0 - beta2) * g.data[i] * g.data[i];
      double mhat = m.data[i] / bc1;
      double vhat = v.data[i] / bc2;
      p.data[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

namespace {

std::vector<double> forward_batch(const ModelConfig& cfg,
                                  const ModelParams& params,
                                  const LabeledDataset& data,
                                  std::size_t batch_size) {
  std::vector<double> out;
  out.reserve(data.size());
  for (std::size_t start = 0; start < data.size(); start += batch_size) {
    std::size_t end = std::min(start + batch_size, data.size());
    std::vector<const FeaturizedGraph*> graphs;
    for (std::size_t i = start; i < end; ++i) graphs.push_back(&data[i].graph);
    for (double v : forward(cfg, params, batch_graphs(graphs)))
      out.push_back(v);
  }
  return out;
}

double eval_wmse(const ModelConfig& cfg, const ModelParams& params,
                 const LabeledDataset& data, const LabelStats& stats,
                 double alpha, std::size_t batch_size) {
  std::vector<double> z = forward_batch(cfg, params, data, batch_size);
  std::vector<double> y(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    y[i] = standardize(data[i].label, stats);
  return wmse_loss(z, y, alpha);
}

}  // namespace

std::pair<ModelCheckpoint, TrainHistory> train(const ModelConfig& model_cfg,
                                               const TrainConfig& train_cfg,
                                               const LabeledDataset& train_set,
                                               const LabeledDataset& val_set) {
  if (train_set.empty() || val_set.empty())
    throw EmptyBatch("train: empty train or validation set");
  std::vector<double> raw_labels(train_set.size());
  for (std::size_t i = 0; i < train_set.size(); ++i)
    raw_labels[i] = train_set[i].label;
  LabelStats stats = standardize_labels(raw_labels);

  ModelParams params = init_params(model_cfg, train_cfg.seed);
  AdamState adam;
  std::mt19937_64 shuffle_rng(train_cfg.seed ^ 0xc2b2ae3d27d4eb4full);
  std::mt19937_64 dropout_rng(train_cfg.seed ^ 0x9e3779b97f4a7c15ull);

  ModelCheckpoint best;
  best.model = model_cfg;
  best.train_config = train_cfg;
  best.label_mean = stats.mean;
  best.label_std = stats.std;
  best.best_val_loss = std::numeric_limits<double>::infinity();

  TrainHistory history;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t since_best = 0;

  for (std::size_t epoch = 0; epoch < train_cfg.max_epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double weighted_sum = 0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size();
         start += train_cfg.batch_size) {
      std::size_t end = std::min(start + train_cfg.batch_size, order.size());
      std::vector<const FeaturizedGraph*> graphs;
      std::vector<double> y;
      for (std::size_t i = start; i < end; ++i) {
        graphs.push_back(&train_set[order[i]].graph);
        y.push_back(standardize(train_set[order[i]].label, stats));
      }
      FeaturizedGraph batch = batch_graphs(graphs);
      Tape tape;
      TapeParams tp = register_params(tape, params);
      auto z = forward_on_tape(tape, model_cfg, tp, batch, true, &dropout_rng);
      auto loss = wmse_loss_on_tape(tape, z, y, train_cfg.alpha);
      double lv = tape.value(loss).data[0];
      if (!std::isfinite(lv))
        throw Divergence("train: non-finite loss at epoch " +
                         std::to_string(epoch));
      tape.backward(loss);
      std::map<std::string, Tensor> grads;
      for (const auto& [name, id] : tp.ids) grads[name] = tape.grad(id);
      adam_step(params, grads, adam, train_cfg.learning_rate);
      weighted_sum += lv * double(end - start);
      seen += end - start;
    }
    double train_wmse = weighted_sum / double(seen);
    double val_wmse = eval_wmse(model_cfg, params, val_set, stats,
                                train_cfg.alpha, train_cfg.batch_size);
    if (!std::isfinite(val_wmse))
      throw Divergence("train: non-finite validation loss at epoch " +
                       std::to_string(epoch));
    double seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    history.push_back(EpochRecord{epoch, train_wmse, val_wmse, seconds});
    if (val_wmse < best.best_val_loss) {
      best.best_val_loss = val_wmse;
      best.epoch_of_best = epoch;
      best.params = params;
      since_best = 0;
    } else if (train_cfg.early_stop_patience > 0 &&
               ++since_best >= train_cfg.early_stop_patience) {
      break;
    }
  }
  return {std::move(best), std::move(history)};
}

std::vector<double> predict(const ModelCheckpoint& ckpt,
                            const FeaturizedGraph& batch) {
  LabelStats stats{ckpt.label_mean, ckpt.label_std};
  std::vector<double> z = forward(ckpt.model, ckpt.params, batch);
  for (double& v : z) v = destandardize(v, stats);
  return z;
}

}  // namespace dsd
