// SPDX-License-Identifier: Apache-2.0
#include <fstream>

#include <json.hpp>

#include "dsd/training.hpp"

namespace dsd {

namespace {

using nlohmann::json;

json tensor_to_json(const Tensor& t) {
  return json{{"shape", t.shape}, {"data", t.data}};
}

Tensor tensor_from_json(const json& j) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("data"))
    throw FormatError("checkpoint: malformed tensor entry");
  Tensor t(j.at("shape").get<std::vector<std::size_t>>(),
           j.at("data").get<std::vector<double>>());
  return t;
}

template <typename T>
T require(const json& j, const char* key) {
  if (!j.contains(key))
    throw FormatError(std::string("checkpoint: missing field ") + key);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("checkpoint: bad field ") + key);
  }
}

}  // namespace

void save_checkpoint(const ModelCheckpoint& ckpt, const std::string& path) {
  json j;
  j["format_version"] = "1";
  j["architecture"] = architecture_name(ckpt.model.architecture);
  j["model"] = {{"hidden_dim", ckpt.model.hidden_dim},
                {"num_layers", ckpt.model.num_layers},
                {"dropout_rate", ckpt.model.dropout_rate},
                {"input_dim", ckpt.model.input_dim}};
  j["train_config"] = {{"learning_rate", ckpt.train_config.learning_rate},
                       {"batch_size", ckpt.train_config.batch_size},
                       {"max_epochs", ckpt.train_config.max_epochs},
                       {"alpha", ckpt.train_config.alpha},
                       {"seed", ckpt.train_config.seed},
                       {"early_stop_patience",
                        ckpt.train_config.early_stop_patience}};
  j["label_mean"] = ckpt.label_mean;
  j["label_std"] = ckpt.label_std;
  j["best_val_loss"] = ckpt.best_val_loss;
  j["epoch_of_best"] = ckpt.epoch_of_best;
  json params = json::object();
  for (const auto& [name, tensor] : ckpt.params)
    params[name] = tensor_to_json(tensor);
  j["params"] = std::move(params);
  std::ofstream out(path);
  if (!out) throw FormatError("checkpoint: cannot write " + path);
  out << j.dump(2) << "\n";
}

ModelCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("checkpoint: cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint: parse failure: ") + e.what());
  }
  std::string version = require<std::string>(j, "format_version");
  if (version != "1")
    throw VersionMismatch("checkpoint: unsupported format_version " + version);

  ModelCheckpoint c;
  c.model.architecture =
      architecture_from_name(require<std::string>(j, "architecture"));
  json m = require<json>(j, "model");
  c.model.hidden_dim = require<std::size_t>(m, "hidden_dim");
  c.model.num_layers = require<std::size_t>(m, "num_layers");
  c.model.dropout_rate = require<double>(m, "dropout_rate");
  c.model.input_dim = require<std::size_t>(m, "input_dim");
  json t = require<json>(j, "train_config");
  c.train_config.learning_rate = require<double>(t, "learning_rate");
  c.train_config.batch_size = require<std::size_t>(t, "batch_size");
  c.train_config.max_epochs = require<std::size_t>(t, "max_epochs");
  c.train_config.alpha = require<double>(t, "alpha");
  c.train_config.seed = require<uint64_t>(t, "seed");
  c.train_config.early_stop_patience =
      require<std::size_t>(t, "early_stop_patience");
  c.label_mean = require<double>(j, "label_mean");
  c.label_std = require<double>(j, "label_std");
  if (!(c.label_std > 0))
    throw FormatError("checkpoint: label_std must be positive");
  c.best_val_loss = require<double>(j, "best_val_loss");
  c.epoch_of_best = require<std::size_t>(j, "epoch_of_best");
  json params = require<json>(j, "params");
  ModelParams reference = init_params(c.model, 0);
  for (const auto& [name, entry] : params.items())
    c.params[name] = tensor_from_json(entry);
  for (const auto& [name, tensor] : reference) {
    auto it = c.params.find(name);
    if (it == c.params.end())
      throw FormatError("checkpoint: missing parameter " + name);
    if (!it->second.same_shape(tensor))
      throw FormatError("checkpoint: shape mismatch for parameter " + name);
  }
  if (c.params.size() != reference.size())
    throw FormatError("checkpoint: unexpected extra parameters");
  return c;
}

void save_history(const TrainHistory& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("history: cannot write " + path);
  out << "epoch,train_wmse,val_wmse,seconds\n";
  char buf[160];
  for (const EpochRecord& r : history) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.6f\n", r.epoch,
                  r.train_wmse, r.val_wmse, r.seconds);
    out << buf;
  }
}

}  // namespace dsd
