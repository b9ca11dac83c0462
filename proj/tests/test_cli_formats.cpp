// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsd/molgraph.hpp"
#include "dsd/training.hpp"

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "dsd_cli_test";

int run(const std::string& args) {
  std::string cmd = std::string(DSD_CLI_PATH) + " " + args + " 2>" +
                    (kWork / "stderr.txt").string();
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string stderr_text() {
  std::ifstream in(kWork / "stderr.txt");
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

std::vector<std::string> file_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string file_text(const fs::path& p) {
  std::ifstream in(p);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

struct Workspace {
  Workspace() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
};

std::string quick_config_json() {
  return R"({
  "seed": 5,
  "generator": {"min_atoms": 6, "max_atoms": 14},
  "oracle": {"nan_fraction": 0.0},
  "pipeline": {"rho": 0.12, "sigma": 1.0, "zeta_list": [0.01]},
  "model": {"hidden_dim": 8, "num_layers": 2, "dropout_rate": 0.0},
  "train": {"batch_size": 64, "max_epochs": 2}
})";
}

}  // namespace

TEST_CASE("cli end-to-end file contracts") {
  Workspace ws;
  fs::path cfg = kWork / "config.json";
  write_file(cfg, quick_config_json());
  std::string c = " --config " + cfg.string();

  SUBCASE("gen-data writes parseable, reproducible libraries") {
    fs::path lib = kWork / "lib.smi";
    REQUIRE(run("gen-data" + c + " --count 200 --out " + lib.string()) == 0);
    std::vector<std::string> lines = file_lines(lib);
    CHECK(lines.size() == 200);
    for (const std::string& s : lines) CHECK_NOTHROW(dsd::parse_smiles(s));
    CHECK(fs::exists(lib.string() + ".config.json"));

    fs::path lib2 = kWork / "lib2.smi";
    REQUIRE(run("gen-data" + c + " --count 200 --out " + lib2.string()) == 0);
    CHECK(file_text(lib) == file_text(lib2));

    CHECK(run("gen-data" + c + " --count 0 --out " + lib.string()) == 2);
  }

  SUBCASE("dock output format and noise-free determinism") {
    fs::path lib = kWork / "lib.smi";
    REQUIRE(run("gen-data" + c + " --count 300 --out " + lib.string()) == 0);
    fs::path docked = kWork / "docked.csv";
    REQUIRE(run("dock" + c + " --in " + lib.string() + " --out " +
                docked.string()) == 0);
    std::vector<std::string> lines = file_lines(docked);
    REQUIRE(lines.size() == 301);
    CHECK(lines[0] == "smiles,dock_score");

    fs::path nf1 = kWork / "nf1.csv", nf2 = kWork / "nf2.csv";
    REQUIRE(run("dock" + c + " --noise-free --in " + lib.string() + " --out " +
                nf1.string()) == 0);
    REQUIRE(run("dock" + c + " --noise-free --in " + lib.string() + " --out " +
                nf2.string()) == 0);
    CHECK(file_text(nf1) == file_text(nf2));

    // an unparseable line fails with its line number, no partial output
    fs::path bad = kWork / "bad.smi";
    write_file(bad, "CCO\nCCN\nC1CC\n");
    fs::path out = kWork / "bad.csv";
    CHECK(run("dock" + c + " --in " + bad.string() + " --out " + out.string()) ==
          1);
    CHECK(stderr_text().find(":3") != std::string::npos);
    CHECK(!fs::exists(out));
  }

  SUBCASE("nan injection rate in docked output") {
    fs::path lib = kWork / "lib.smi";
    REQUIRE(run("gen-data" + c + " --count 2000 --out " + lib.string()) == 0);
    fs::path cfg_nan = kWork / "cfg_nan.json";
    write_file(cfg_nan, R"({"seed": 5, "oracle": {"nan_fraction": 0.05}})");
    fs::path docked = kWork / "nan.csv";
    REQUIRE(run("dock --config " + cfg_nan.string() + " --in " + lib.string() +
                " --out " + docked.string()) == 0);
    std::size_t nans = 0;
    for (const std::string& line : file_lines(docked))
      if (line.size() > 4 && line.rfind(",NaN") == line.size() - 4) ++nans;
    CHECK(nans > 50);
    CHECK(nans < 150);
  }

  SUBCASE("train, infer and metrics round trip") {
    fs::path lib = kWork / "lib.smi";
    REQUIRE(run("gen-data" + c + " --count 400 --out " + lib.string()) == 0);
    fs::path docked = kWork / "docked.csv";
    REQUIRE(run("dock" + c + " --in " + lib.string() + " --out " +
                docked.string()) == 0);
    fs::path ckpt = kWork / "model.json";
    REQUIRE(run("train" + c + " --data " + docked.string() + " --out " +
                ckpt.string()) == 0);
    CHECK_NOTHROW(dsd::load_checkpoint(ckpt.string()));
    CHECK(fs::exists(ckpt.string() + ".history.csv"));

    fs::path preds = kWork / "preds.csv";
    REQUIRE(run("infer --checkpoint " + ckpt.string() + " --in " +
                lib.string() + " --out " + preds.string()) == 0);
    CHECK(file_lines(preds).size() == 401);  // header + one row per molecule

    // identical true/pred columns score a perfect surface
    fs::path report = kWork / "report.json";
    REQUIRE(run("metrics" + c + " --true " + docked.string() + " --pred " +
                docked.string() + " --out " + report.string()) == 0);
    nlohmann::json j = nlohmann::json::parse(file_text(report));
    CHECK(j.at("res_score").get<double>() == 1.0);
    CHECK(fs::exists(report.string() + ".res.csv"));
  }

  SUBCASE("screen with sigma 1 recalls everything") {
    fs::path lib = kWork / "lib.smi";
    REQUIRE(run("gen-data" + c + " --count 1000 --out " + lib.string()) == 0);
    fs::path outdir = kWork / "screen_out";
    REQUIRE(run("screen" + c + " --library " + lib.string() + " --outdir " +
                outdir.string()) == 0);
    nlohmann::json j = nlohmann::json::parse(file_text(outdir / "report.json"));
    for (const auto& cell : j.at("cells"))
      CHECK(cell.at("recall").get<double>() == 1.0);
    for (const char* name :
         {"predictions.csv", "selection.csv", "res_surface.csv",
          "resolved_config.json", "timing.json", "history.csv"})
      CHECK(fs::exists(outdir / name));
    // resolved config parses and echoes the expanded defaults
    nlohmann::json rc =
        nlohmann::json::parse(file_text(outdir / "resolved_config.json"));
    CHECK(rc.at("train").at("learning_rate").get<double>() == 0.001);
  }

  SUBCASE("config errors exit with code 2") {
    fs::path bad = kWork / "bad.json";
    write_file(bad, R"({"seed": 1, "pipelin": {"rho": 0.1}})");
    fs::path lib = kWork / "lib.smi";
    CHECK(run("gen-data --config " + bad.string() + " --count 10 --out " +
              lib.string()) == 2);
    CHECK(stderr_text().find("pipelin") != std::string::npos);

    write_file(bad, R"({"train": {"alpha": -1}})");
    CHECK(run("gen-data --config " + bad.string() + " --count 10 --out " +
              lib.string()) == 2);
    CHECK(run("bogus-subcommand") == 2);
  }

  SUBCASE("grid sweep emits one row per combination") {
    fs::path lib = kWork / "lib.smi";
    REQUIRE(run("gen-data" + c + " --count 1000 --out " + lib.string()) == 0);
    fs::path grid = kWork / "grid.json";
    write_file(grid, R"({"alpha": [0.0, 0.8]})");
    fs::path outdir = kWork / "grid_out";
    REQUIRE(run("grid" + c + " --param-grid " + grid.string() + " --library " +
                lib.string() + " --outdir " + outdir.string()) == 0);
    std::vector<std::string> rows = file_lines(outdir / "grid_summary.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].rfind("hidden_dim,", 0) == 0);
    for (std::size_t i = 1; i < rows.size(); ++i)
      CHECK(rows[i].find(",ok") != std::string::npos);

    write_file(grid, R"({"alhpa": [0.0]})");
    CHECK(run("grid" + c + " --param-grid " + grid.string() + " --library " +
              lib.string() + " --outdir " + outdir.string()) == 2);
  }
}
