// SPDX-License-Identifier: Apache-2.0
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dsd/screening.hpp"

namespace py = pybind11;
using namespace dsd;

namespace {

std::vector<MolecularGraph> parse_all(const std::vector<std::string>& smiles) {
  std::vector<MolecularGraph> graphs;
  graphs.reserve(smiles.size());
  for (const std::string& s : smiles) graphs.push_back(parse_smiles(s));
  return graphs;
}

}  // namespace

PYBIND11_MODULE(_dsdock, m) {
  m.doc() = "surrogate docking engine: SMILES graphs, GNN surrogates, "
            "ranking metrics";

  py::class_<MolecularGraph>(m, "Molecule")
      .def_static("from_smiles", &parse_smiles, py::arg("smiles"))
      .def("to_smiles", &write_smiles)
      .def_property_readonly("num_atoms", &MolecularGraph::num_atoms)
      .def_property_readonly(
          "num_bonds",
          [](const MolecularGraph& g) { return g.bonds.size(); })
      .def_property_readonly("num_rings", &cycle_count)
      .def_property_readonly(
          "total_hydrogens",
          [](const MolecularGraph& g) {
            int h = 0;
            for (const Atom& a : g.atoms) h += a.total_h();
            return h;
          })
      .def("__repr__", [](const MolecularGraph& g) {
        return "<Molecule " + write_smiles(g) + ">";
      });

  m.def(
      "generate_library",
      [](int count, uint64_t seed, int min_atoms, int max_atoms) {
        GeneratorParams p;
        p.seed = seed;
        p.min_atoms = min_atoms;
        p.max_atoms = max_atoms;
        std::vector<std::string> out;
        for (const MolecularGraph& g : generate_random_library(p, count))
          out.push_back(write_smiles(g));
        return out;
      },
      py::arg("count"), py::arg("seed") = 0, py::arg("min_atoms") = 8,
      py::arg("max_atoms") = 30);

  m.def(
      "dock",
      [](const std::vector<std::string>& smiles, uint64_t seed,
         double nan_fraction, bool noise_free) {
        OracleParams p;
        p.seed = seed;
        p.nan_fraction = nan_fraction;
        if (noise_free) {
          p.noise_base = 0;
          p.noise_slope = 0;
          p.nan_fraction = 0;
        }
        std::vector<MolecularGraph> graphs = parse_all(smiles);
        CalibratedOracle oracle = calibrate_oracle(graphs, p);
        std::vector<double> scores;
        for (const MolecularGraph& g : graphs)
          scores.push_back(noise_free ? oracle.dock_noise_free(g)
                                      : oracle.dock(g));
        return scores;
      },
      py::arg("smiles"), py::arg("seed") = 0, py::arg("nan_fraction") = 0.0,
      py::arg("noise_free") = false);

  m.def(
      "train_surrogate",
      [](const std::vector<std::string>& smiles,
         const std::vector<double>& scores, const std::string& out_path,
         const std::string& architecture, std::size_t hidden_dim,
         std::size_t num_layers, double dropout, double alpha,
         std::size_t max_epochs, uint64_t seed) {
        if (smiles.size() != scores.size())
          throw BadInput("train_surrogate: smiles/scores length mismatch");
        LabeledDataset labeled;
        for (std::size_t i = 0; i < smiles.size(); ++i)
          labeled.push_back(
              {featurize(add_virtual_node(parse_smiles(smiles[i]))),
               scores[i]});
        SplitDataset split = split_labeled(std::move(labeled), 0.8, 0.1, seed);
        ModelConfig mc;
        mc.architecture = architecture_from_name(architecture);
        mc.hidden_dim = hidden_dim;
        mc.num_layers = num_layers;
        mc.dropout_rate = dropout;
        TrainConfig tc;
        tc.alpha = alpha;
        tc.max_epochs = max_epochs;
        tc.seed = seed;
        auto [ckpt, history] = train(mc, tc, split.train, split.val);
        save_checkpoint(ckpt, out_path);
        return ckpt.best_val_loss;
      },
      py::arg("smiles"), py::arg("scores"), py::arg("out_path"),
      py::arg("architecture") = "filmv2", py::arg("hidden_dim") = 64,
      py::arg("num_layers") = 4, py::arg("dropout") = 0.1,
      py::arg("alpha") = 0.8, py::arg("max_epochs") = 300, py::arg("seed") = 0);

  m.def(
      "predict",
      [](const std::string& checkpoint_path,
         const std::vector<std::string>& smiles) {
        ModelCheckpoint ckpt = load_checkpoint(checkpoint_path);
        std::vector<double> out;
        std::size_t bs = ckpt.train_config.batch_size;
        std::vector<FeaturizedGraph> feats;
        for (const std::string& s : smiles)
          feats.push_back(featurize(add_virtual_node(parse_smiles(s))));
        for (std::size_t start = 0; start < feats.size(); start += bs) {
          std::size_t end = std::min(start + bs, feats.size());
          std::vector<const FeaturizedGraph*> batch;
          for (std::size_t i = start; i < end; ++i) batch.push_back(&feats[i]);
          for (double v : predict(ckpt, batch_graphs(batch))) out.push_back(v);
        }
        return out;
      },
      py::arg("checkpoint_path"), py::arg("smiles"));

  m.def("recall_at", &recall_at, py::arg("y_true"), py::arg("y_pred"),
        py::arg("sigma"), py::arg("zeta"));
  m.def(
      "res_score",
      [](const std::vector<double>& y_true, const std::vector<double>& y_pred,
         std::size_t grid_points) {
        return res_surface(y_true, y_pred, grid_points).res_score;
      },
      py::arg("y_true"), py::arg("y_pred"), py::arg("grid_points") = 50);
  m.def(
      "aurtc",
      [](const std::vector<double>& y_true, const std::vector<double>& y_pred,
         double zeta, std::size_t grid_points) {
        return aurtc(rtc(y_true, y_pred, zeta, grid_points));
      },
      py::arg("y_true"), py::arg("y_pred"), py::arg("zeta"),
      py::arg("grid_points") = 50);
  m.def(
      "auroc",
      [](const std::vector<double>& y_true, const std::vector<double>& y_pred,
         double zeta) {
        return classification_metrics(y_true, y_pred, 1.0, zeta).auroc;
      },
      py::arg("y_true"), py::arg("y_pred"), py::arg("zeta"));
  m.def("compute_speedup", &compute_speedup, py::arg("t_dock"),
        py::arg("t_inf"), py::arg("sigma"));
}
