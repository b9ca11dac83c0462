// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <numeric>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsd/screening.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// configuration problems exit with code 2, computational failures with 1
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void reject_unknown(const json& section, const std::string& name,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, value] : section.items())
    if (!allowed.count(key))
      throw ConfigError("config: unknown key '" + key + "' in section '" +
                        name + "'");
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(std::string("config: bad value for key '") + key + "'");
    }
  }
}

struct RunConfig {
  uint64_t seed = 0;
  dsd::GeneratorParams gen;
  dsd::OracleParams oracle;
  dsd::PipelineConfig pipeline;
  std::size_t metrics_grid_points = 50;
  std::vector<double> metrics_sigma_list = {0.1};
  std::vector<double> metrics_zeta_list = {0.01, 0.001};
};

RunConfig parse_config(const std::string& path) {
  RunConfig c;
  if (path.empty()) {
    c.oracle.seed = c.gen.seed = c.pipeline.seed = c.pipeline.train.seed = 0;
    return c;
  }
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: parse failure: ") + e.what());
  }
  reject_unknown(j, "<root>",
                 {"seed", "generator", "oracle", "pipeline", "model", "train",
                  "metrics"});
  maybe(j, "seed", c.seed);
  c.gen.seed = c.oracle.seed = c.pipeline.seed = c.pipeline.train.seed = c.seed;

  if (j.contains("generator")) {
    const json& g = j.at("generator");
    reject_unknown(g, "generator",
                   {"min_atoms", "max_atoms", "element_weights",
                    "min_ring_closures", "max_ring_closures",
                    "aromatic_ring_probability", "seed"});
    maybe(g, "min_atoms", c.gen.min_atoms);
    maybe(g, "max_atoms", c.gen.max_atoms);
    maybe(g, "element_weights", c.gen.element_weights);
    maybe(g, "min_ring_closures", c.gen.min_ring_closures);
    maybe(g, "max_ring_closures", c.gen.max_ring_closures);
    maybe(g, "aromatic_ring_probability", c.gen.aromatic_ring_probability);
    maybe(g, "seed", c.gen.seed);
  }
  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    reject_unknown(o, "oracle",
                   {"w_aromatic", "w_rings", "w_hetero", "w_mean_degree",
                    "w_heavy", "noise_base", "noise_slope", "nan_fraction",
                    "seed"});
    maybe(o, "w_aromatic", c.oracle.w_aromatic);
    maybe(o, "w_rings", c.oracle.w_rings);
    maybe(o, "w_hetero", c.oracle.w_hetero);
    maybe(o, "w_mean_degree", c.oracle.w_mean_degree);
    maybe(o, "w_heavy", c.oracle.w_heavy);
    maybe(o, "noise_base", c.oracle.noise_base);
    maybe(o, "noise_slope", c.oracle.noise_slope);
    maybe(o, "nan_fraction", c.oracle.nan_fraction);
    maybe(o, "seed", c.oracle.seed);
    if (c.oracle.nan_fraction < 0 || c.oracle.nan_fraction >= 1)
      throw ConfigError("config: oracle.nan_fraction must lie in [0, 1)");
  }
  if (j.contains("pipeline")) {
    const json& p = j.at("pipeline");
    reject_unknown(p, "pipeline",
                   {"rho", "sigma", "zeta_list", "split", "grid_points",
                    "t_dock_hours_per_molecule", "seed"});
    maybe(p, "rho", c.pipeline.rho);
    maybe(p, "sigma", c.pipeline.sigma);
    maybe(p, "zeta_list", c.pipeline.zeta_list);
    if (p.contains("split")) {
      std::vector<double> split = p.at("split").get<std::vector<double>>();
      if (split.size() != 3 ||
          std::abs(split[0] + split[1] + split[2] - 1.0) > 1e-9)
        throw ConfigError("config: pipeline.split must be 3 fractions summing to 1");
      c.pipeline.split_train = split[0];
      c.pipeline.split_val = split[1];
      c.pipeline.split_test = split[2];
    }
    maybe(p, "grid_points", c.pipeline.grid_points);
    maybe(p, "t_dock_hours_per_molecule", c.pipeline.t_dock_hours_per_molecule);
    maybe(p, "seed", c.pipeline.seed);
  }
  if (j.contains("model")) {
    const json& m = j.at("model");
    reject_unknown(m, "model",
                   {"architecture", "hidden_dim", "num_layers", "dropout_rate"});
    if (m.contains("architecture"))
      c.pipeline.model.architecture =
          dsd::architecture_from_name(m.at("architecture").get<std::string>());
    maybe(m, "hidden_dim", c.pipeline.model.hidden_dim);
    maybe(m, "num_layers", c.pipeline.model.num_layers);
    maybe(m, "dropout_rate", c.pipeline.model.dropout_rate);
  }
  if (j.contains("train")) {
    const json& t = j.at("train");
    reject_unknown(t, "train",
                   {"learning_rate", "batch_size", "max_epochs", "alpha",
                    "seed", "early_stop_patience"});
    maybe(t, "learning_rate", c.pipeline.train.learning_rate);
    maybe(t, "batch_size", c.pipeline.train.batch_size);
    maybe(t, "max_epochs", c.pipeline.train.max_epochs);
    maybe(t, "alpha", c.pipeline.train.alpha);
    maybe(t, "seed", c.pipeline.train.seed);
    maybe(t, "early_stop_patience", c.pipeline.train.early_stop_patience);
    if (c.pipeline.train.alpha < 0)
      throw ConfigError("config: train.alpha must be >= 0");
    if (!(c.pipeline.train.learning_rate > 0))
      throw ConfigError("config: train.learning_rate must be > 0");
  }
  if (j.contains("metrics")) {
    const json& m = j.at("metrics");
    reject_unknown(m, "metrics", {"grid_points", "sigma_list", "zeta_list"});
    maybe(m, "grid_points", c.metrics_grid_points);
    maybe(m, "sigma_list", c.metrics_sigma_list);
    maybe(m, "zeta_list", c.metrics_zeta_list);
  }
  return c;
}

json resolved_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["generator"] = {{"min_atoms", c.gen.min_atoms},
                    {"max_atoms", c.gen.max_atoms},
                    {"element_weights", c.gen.element_weights},
                    {"min_ring_closures", c.gen.min_ring_closures},
                    {"max_ring_closures", c.gen.max_ring_closures},
                    {"aromatic_ring_probability", c.gen.aromatic_ring_probability},
                    {"seed", c.gen.seed}};
  j["oracle"] = {{"w_aromatic", c.oracle.w_aromatic},
                 {"w_rings", c.oracle.w_rings},
                 {"w_hetero", c.oracle.w_hetero},
                 {"w_mean_degree", c.oracle.w_mean_degree},
                 {"w_heavy", c.oracle.w_heavy},
                 {"noise_base", c.oracle.noise_base},
                 {"noise_slope", c.oracle.noise_slope},
                 {"nan_fraction", c.oracle.nan_fraction},
                 {"seed", c.oracle.seed}};
  j["pipeline"] = {{"rho", c.pipeline.rho},
                   {"sigma", c.pipeline.sigma},
                   {"zeta_list", c.pipeline.zeta_list},
                   {"split",
                    {c.pipeline.split_train, c.pipeline.split_val,
                     c.pipeline.split_test}},
                   {"grid_points", c.pipeline.grid_points},
                   {"t_dock_hours_per_molecule",
                    c.pipeline.t_dock_hours_per_molecule},
                   {"seed", c.pipeline.seed}};
  j["model"] = {{"architecture",
                 dsd::architecture_name(c.pipeline.model.architecture)},
                {"hidden_dim", c.pipeline.model.hidden_dim},
                {"num_layers", c.pipeline.model.num_layers},
                {"dropout_rate", c.pipeline.model.dropout_rate}};
  j["train"] = {{"learning_rate", c.pipeline.train.learning_rate},
                {"batch_size", c.pipeline.train.batch_size},
                {"max_epochs", c.pipeline.train.max_epochs},
                {"alpha", c.pipeline.train.alpha},
                {"seed", c.pipeline.train.seed},
                {"early_stop_patience", c.pipeline.train.early_stop_patience}};
  j["metrics"] = {{"grid_points", c.metrics_grid_points},
                  {"sigma_list", c.metrics_sigma_list},
                  {"zeta_list", c.metrics_zeta_list}};
  return j;
}

void write_resolved(const RunConfig& c, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << resolved_json(c).dump(2) << "\n";
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::vector<dsd::MolecularGraph> parse_library(const std::string& path) {
  std::vector<dsd::MolecularGraph> library;
  std::vector<std::string> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      library.push_back(dsd::parse_smiles(lines[i]));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(i + 1) + ": " +
                               e.what());
    }
  }
  return library;
}

// labeled CSV `smiles,dock_score`; NaN rows dropped
struct LabeledRows {
  std::vector<std::string> smiles;
  std::vector<double> scores;
};

LabeledRows read_labeled_csv(const std::string& path) {
  LabeledRows rows;
  std::vector<std::string> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i == 0 && lines[i].rfind("smiles,", 0) == 0) continue;
    auto comma = lines[i].rfind(',');
    if (comma == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(i + 1) +
                               ": expected 'smiles,score'");
    std::string value = lines[i].substr(comma + 1);
    double score;
    if (value == "NaN" || value == "nan")
      score = std::nan("");
    else
      score = std::stod(value);
    if (std::isnan(score)) continue;
    rows.smiles.push_back(lines[i].substr(0, comma));
    rows.scores.push_back(score);
  }
  return rows;
}

// score column: plain values, or the last field of each CSV row
std::vector<double> read_score_column(const std::string& path) {
  std::vector<double> scores;
  std::vector<std::string> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string field = lines[i];
    auto comma = field.rfind(',');
    if (comma != std::string::npos) field = field.substr(comma + 1);
    try {
      scores.push_back(std::stod(field));
    } catch (const std::exception&) {
      if (i == 0) continue;  // header
      throw std::runtime_error(path + ":" + std::to_string(i + 1) +
                               ": not a number: " + field);
    }
  }
  return scores;
}

int cmd_gen_data(const RunConfig& cfg, long long count, const std::string& out) {
  if (count <= 0) throw ConfigError("gen-data: --count must be positive");
  std::vector<dsd::MolecularGraph> library =
      dsd::generate_random_library(cfg.gen, int(count));
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out);
  for (const dsd::MolecularGraph& g : library) os << dsd::write_smiles(g) << "\n";
  write_resolved(cfg, out + ".config.json");
  std::cout << "generated " << library.size() << " molecules (seed "
            << cfg.gen.seed << ") -> " << out << "\n";
  return 0;
}

int cmd_dock(const RunConfig& cfg, const std::string& in,
             const std::string& out, bool noise_free) {
  std::vector<dsd::MolecularGraph> library = parse_library(in);
  dsd::OracleParams op = cfg.oracle;
  if (noise_free) {
    op.noise_base = 0;
    op.noise_slope = 0;
    op.nan_fraction = 0;
  }
  dsd::CalibratedOracle oracle = dsd::calibrate_oracle(library, op);
  std::string tmp = out + ".partial";
  {
    std::ofstream os(tmp);
    if (!os) throw std::runtime_error("cannot write " + out);
    os << "smiles,dock_score\n";
    char buf[64];
    std::vector<std::string> lines = read_lines(in);
    for (std::size_t i = 0; i < library.size(); ++i) {
      double s = noise_free ? oracle.dock_noise_free(library[i])
                            : oracle.dock(library[i]);
      if (std::isnan(s)) {
        os << lines[i] << ",NaN\n";
      } else {
        std::snprintf(buf, sizeof buf, ",%.17g\n", s);
        os << lines[i] << buf;
      }
    }
  }
  fs::rename(tmp, out);
  write_resolved(cfg, out + ".config.json");
  return 0;
}

dsd::LabeledDataset featurize_rows(const LabeledRows& rows) {
  dsd::LabeledDataset data;
  for (std::size_t i = 0; i < rows.smiles.size(); ++i) {
    dsd::MolecularGraph g = dsd::parse_smiles(rows.smiles[i]);
    data.push_back(
        {dsd::featurize(dsd::add_virtual_node(g)), rows.scores[i]});
  }
  return data;
}

int cmd_train(const RunConfig& cfg, const std::string& data,
              const std::string& out) {
  LabeledRows rows = read_labeled_csv(data);
  dsd::SplitDataset split =
      dsd::split_labeled(featurize_rows(rows), cfg.pipeline.split_train,
                         cfg.pipeline.split_val, cfg.pipeline.seed);
  auto [ckpt, history] =
      dsd::train(cfg.pipeline.model, cfg.pipeline.train, split.train, split.val);
  dsd::save_checkpoint(ckpt, out);
  dsd::save_history(history, out + ".history.csv");
  write_resolved(cfg, out + ".config.json");
  std::cout << "best val W-MSE " << ckpt.best_val_loss << " at epoch "
            << ckpt.epoch_of_best << "\n";
  return 0;
}

int cmd_infer(const std::string& checkpoint, const std::string& in,
              const std::string& out) {
  dsd::ModelCheckpoint ckpt = dsd::load_checkpoint(checkpoint);
  std::vector<std::string> lines = read_lines(in);
  std::vector<dsd::MolecularGraph> library = parse_library(in);
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out);
  os << "index,smiles,pred_score\n";
  char buf[64];
  std::size_t bs = ckpt.train_config.batch_size;
  std::vector<dsd::FeaturizedGraph> feats;
  feats.reserve(library.size());
  for (const dsd::MolecularGraph& g : library)
    feats.push_back(dsd::featurize(dsd::add_virtual_node(g)));
  std::size_t row = 0;
  for (std::size_t start = 0; start < feats.size(); start += bs) {
    std::size_t end = std::min(start + bs, feats.size());
    std::vector<const dsd::FeaturizedGraph*> batch;
    for (std::size_t i = start; i < end; ++i) batch.push_back(&feats[i]);
    for (double v : dsd::predict(ckpt, dsd::batch_graphs(batch))) {
      std::snprintf(buf, sizeof buf, ",%.17g\n", v);
      os << row << "," << lines[row] << buf;
      ++row;
    }
  }
  return 0;
}

int cmd_screen(const RunConfig& cfg, const std::string& library_path,
               const std::string& outdir) {
  std::vector<dsd::MolecularGraph> library = parse_library(library_path);
  dsd::ScreeningResult r = dsd::run_dsd(library, cfg.pipeline, cfg.oracle);
  dsd::save_screening_result(r, library, outdir);
  write_resolved(cfg, fs::path(outdir) / "resolved_config.json");
  std::cout << "screened " << library.size() << " molecules; res_score "
            << r.report.res_score << "; speedup " << r.speedup << "\n";
  return 0;
}

int cmd_metrics(const RunConfig& cfg, const std::string& true_path,
                const std::string& pred_path, const std::string& out) {
  std::vector<double> yt = read_score_column(true_path);
  std::vector<double> yp = read_score_column(pred_path);
  if (yt.size() != yp.size())
    throw std::runtime_error("metrics: true/pred row counts differ");
  // drop NaN pairs
  std::vector<double> t2, p2;
  for (std::size_t i = 0; i < yt.size(); ++i)
    if (!std::isnan(yt[i]) && !std::isnan(yp[i])) {
      t2.push_back(yt[i]);
      p2.push_back(yp[i]);
    }
  dsd::MetricReport rep =
      dsd::build_metric_report(t2, p2, cfg.metrics_sigma_list,
                               cfg.metrics_zeta_list, cfg.metrics_grid_points);
  dsd::save_metric_report(rep, out);
  dsd::save_res_csv(dsd::res_surface(t2, p2, cfg.metrics_grid_points),
                    out + ".res.csv");
  return 0;
}

int cmd_grid(const RunConfig& base, const std::string& grid_path,
             const std::string& library_path, const std::string& outdir) {
  std::ifstream in(grid_path);
  if (!in) throw ConfigError("grid: cannot read " + grid_path);
  json grid;
  try {
    in >> grid;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("grid: parse failure: ") + e.what());
  }
  reject_unknown(grid, "<grid>",
                 {"hidden_dim", "num_layers", "dropout", "alpha", "rho"});
  auto axis_sizes = [&grid](const char* key) -> std::size_t {
    return grid.contains(key) ? grid.at(key).size() : 1;
  };
  std::vector<dsd::MolecularGraph> library = parse_library(library_path);
  dsd::CalibratedOracle oracle = dsd::calibrate_oracle(library, base.oracle);

  fs::create_directories(outdir);
  std::ofstream summary(fs::path(outdir) / "grid_summary.csv");
  summary << "hidden_dim,num_layers,dropout,alpha,rho,n_labeled,val_wmse,"
             "res_score,aurtc,recall,status\n";

  std::vector<dsd::FeaturizedGraph> feats;
  feats.reserve(library.size());
  for (const dsd::MolecularGraph& g : library)
    feats.push_back(dsd::featurize(dsd::add_virtual_node(g)));

  for (std::size_t ih = 0; ih < axis_sizes("hidden_dim"); ++ih)
    for (std::size_t il = 0; il < axis_sizes("num_layers"); ++il)
      for (std::size_t id = 0; id < axis_sizes("dropout"); ++id)
        for (std::size_t ia = 0; ia < axis_sizes("alpha"); ++ia)
          for (std::size_t ir = 0; ir < axis_sizes("rho"); ++ir) {
            RunConfig cfg = base;
            if (grid.contains("hidden_dim"))
              cfg.pipeline.model.hidden_dim = grid["hidden_dim"][ih];
            if (grid.contains("num_layers"))
              cfg.pipeline.model.num_layers = grid["num_layers"][il];
            if (grid.contains("dropout"))
              cfg.pipeline.model.dropout_rate = grid["dropout"][id];
            if (grid.contains("alpha"))
              cfg.pipeline.train.alpha = grid["alpha"][ia];
            if (grid.contains("rho")) cfg.pipeline.rho = grid["rho"][ir];
            char prefix[160];
            std::snprintf(prefix, sizeof prefix, "%zu,%zu,%g,%g,%g",
                          cfg.pipeline.model.hidden_dim,
                          cfg.pipeline.model.num_layers,
                          cfg.pipeline.model.dropout_rate,
                          cfg.pipeline.train.alpha, cfg.pipeline.rho);
            try {
              // label a rho sample, split, train, evaluate on the test split
              std::vector<std::size_t> indices(library.size());
              std::iota(indices.begin(), indices.end(), 0);
              std::mt19937_64 rng(cfg.pipeline.seed ^ 0x2545f4914f6cdd1dull);
              std::shuffle(indices.begin(), indices.end(), rng);
              indices.resize(std::size_t(
                  std::ceil(cfg.pipeline.rho * double(library.size()))));
              dsd::LabeledDataset labeled;
              for (std::size_t i : indices) {
                double s = oracle.dock(library[i]);
                if (!std::isnan(s)) labeled.push_back({feats[i], s});
              }
              dsd::SplitDataset split = dsd::split_labeled(
                  std::move(labeled), cfg.pipeline.split_train,
                  cfg.pipeline.split_val, cfg.pipeline.seed);
              auto [ckpt, history] = dsd::train(
                  cfg.pipeline.model, cfg.pipeline.train, split.train,
                  split.val);
              std::vector<const dsd::FeaturizedGraph*> test_graphs;
              std::vector<double> y_true;
              for (const dsd::LabeledSample& s : split.test) {
                test_graphs.push_back(&s.graph);
                y_true.push_back(s.label);
              }
              std::vector<double> y_pred =
                  dsd::predict(ckpt, dsd::batch_graphs(test_graphs));
              double res =
                  dsd::res_surface(y_true, y_pred, cfg.pipeline.grid_points)
                      .res_score;
              double zeta = cfg.pipeline.zeta_list.front();
              double a = dsd::aurtc(
                  dsd::rtc(y_true, y_pred, zeta, cfg.pipeline.grid_points));
              double rec =
                  dsd::recall_at(y_true, y_pred, cfg.pipeline.sigma, zeta);
              char buf[256];
              std::snprintf(buf, sizeof buf, "%s,%zu,%.6g,%.6g,%.6g,%.6g,ok\n",
                            prefix, split.train.size() + split.val.size() +
                                        split.test.size(),
                            ckpt.best_val_loss, res, a, rec);
              summary << buf;
            } catch (const std::exception& e) {
              summary << prefix << ",,,,,failed: " << e.what() << "\n";
            }
            summary.flush();
          }
  write_resolved(base, fs::path(outdir) / "resolved_config.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deep surrogate docking pipeline"};
  app.require_subcommand(1);

  std::string config_path, in_path, out_path, outdir, checkpoint_path;
  std::string true_path, pred_path, grid_path, library_path;
  long long count = 0;
  bool noise_free = false;

  CLI::App* gen = app.add_subcommand("gen-data", "generate a SMILES library");
  gen->add_option("--config", config_path);
  gen->add_option("--count", count)->required();
  gen->add_option("--out", out_path)->required();

  CLI::App* dock = app.add_subcommand("dock", "score molecules with the oracle");
  dock->add_option("--config", config_path);
  dock->add_option("--in", in_path)->required();
  dock->add_option("--out", out_path)->required();
  dock->add_flag("--noise-free", noise_free);

  CLI::App* train = app.add_subcommand("train", "train a surrogate model");
  train->add_option("--config", config_path);
  train->add_option("--data", in_path)->required();
  train->add_option("--out", out_path)->required();

  CLI::App* infer = app.add_subcommand("infer", "score molecules with a model");
  infer->add_option("--checkpoint", checkpoint_path)->required();
  infer->add_option("--in", in_path)->required();
  infer->add_option("--out", out_path)->required();

  CLI::App* screen = app.add_subcommand("screen", "full screening pipeline");
  screen->add_option("--config", config_path);
  screen->add_option("--library", library_path)->required();
  screen->add_option("--outdir", outdir)->required();

  CLI::App* metrics = app.add_subcommand("metrics", "evaluate rankings");
  metrics->add_option("--config", config_path);
  metrics->add_option("--true", true_path)->required();
  metrics->add_option("--pred", pred_path)->required();
  metrics->add_option("--out", out_path)->required();

  CLI::App* grid = app.add_subcommand("grid", "hyperparameter sweep");
  grid->add_option("--config", config_path);
  grid->add_option("--param-grid", grid_path)->required();
  grid->add_option("--library", library_path)->required();
  grid->add_option("--outdir", outdir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = parse_config(config_path);
    if (gen->parsed()) return cmd_gen_data(cfg, count, out_path);
    if (dock->parsed()) return cmd_dock(cfg, in_path, out_path, noise_free);
    if (train->parsed()) return cmd_train(cfg, in_path, out_path);
    if (infer->parsed()) return cmd_infer(checkpoint_path, in_path, out_path);
    if (screen->parsed()) return cmd_screen(cfg, library_path, outdir);
    if (metrics->parsed()) return cmd_metrics(cfg, true_path, pred_path, out_path);
    if (grid->parsed()) return cmd_grid(cfg, grid_path, library_path, outdir);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
