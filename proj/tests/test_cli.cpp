// SPDX-License-Identifier: Apache-2.0
// End-to-end checks of the installed command-line surface: artifact layout,
// exit codes, metadata stamps, and byte-level determinism.
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fidqae/data.hpp"
#include "fidqae/hwfeat.hpp"
#include "fidqae/model.hpp"
#include "fidqae/noise.hpp"
#include "fidqae/train.hpp"
#include "synthetic.hpp"

using namespace fidqae;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd =
      std::string(FIDQAE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
#ifdef _WIN32
  return status;
#else
  return WEXITSTATUS(status);
#endif
}

std::string capture_stderr(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "stderr.log";
  const std::string cmd = std::string(FIDQAE_CLI_PATH) + " " + args +
                          " >/dev/null 2>" + log.string();
  std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string first_line(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

struct CliFixture {
  fs::path dir;
  fs::path dataset;
  fs::path config;
  fs::path out;

  CliFixture() {
    dir = fs::temp_directory_path() / "fidqae_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    dataset = dir / "transactions.csv";
    config = dir / "config.json";
    out = dir / "out";

    // Two data qubits keep the end-to-end run fast; 200 + 40 rows.
    data::save_csv(dataset.string(), synthetic::make_table(200, 40, 7, 2));
    std::ofstream cfg(config);
    cfg << R"({
  "dataset": ")" << dataset.string() << R"(",
  "out_dir": ")" << out.string() << R"(",
  "n_qubits": 2,
  "n_trash": 1,
  "k": 4,
  "split": {"train_nonfraud": 120, "test_nonfraud": 60,
            "test_fraud_fraction": 1.0},
  "train": {"epochs": 4, "batch_size": 16, "learning_rate": 0.05},
  "noise": {"channels": ["bit_flip"], "probabilities": [0.0, 0.5],
            "placement": "final_only"},
  "prevalence_fractions": [0.5, 1.0],
  "shots": {"p": 0.5, "grid": [64, 128], "channels": ["phase_damping"]}
})";
  }

  std::string with_config(const std::string& subcommand) const {
    return subcommand + " --config " + config.string();
  }
};

}  // namespace

TEST_CASE("full pipeline produces every artifact with metadata stamps") {
  CliFixture fx;

  REQUIRE(run(fx.with_config("prepare")) == 0);
  CHECK(fs::exists(fx.out / "reduced.csv"));
  CHECK(fs::exists(fx.out / "selection.json"));
  CHECK(first_line(fx.out / "reduced.csv").rfind("# config_hash=", 0) == 0);

  REQUIRE(run(fx.with_config("train")) == 0);
  CHECK(fs::exists(fx.out / "params.json"));
  CHECK(fs::exists(fx.out / "history.csv"));
  {
    std::ifstream in(fx.out / "history.csv");
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 2 + 4);  // metadata + header + one row per epoch
  }

  REQUIRE(run(fx.with_config("evaluate")) == 0);
  for (const char* name :
       {"fidelities.csv", "metrics.csv", "metrics.json", "distribution.json"})
    CHECK(fs::exists(fx.out / name));
  CHECK(first_line(fx.out / "metrics.csv").rfind("# config_hash=", 0) == 0);
  const std::string metrics_json = read_file(fx.out / "metrics.json");
  CHECK(metrics_json.find("\"config_hash\"") != std::string::npos);
  CHECK(metrics_json.find("\"best\"") != std::string::npos);

  REQUIRE(run(fx.with_config("sweep --kind prevalence")) == 0);
  CHECK(fs::exists(fx.out / "prevalence.csv"));
  CHECK(first_line(fx.out / "prevalence.csv").rfind("# config_hash=", 0) == 0);

  REQUIRE(run(fx.with_config("sweep --kind noise")) == 0);
  CHECK(fs::exists(fx.out / "noise_sweep.csv"));
  {
    std::ifstream in(fx.out / "noise_sweep.csv");
    std::string line;
    int rows = 0;
    while (std::getline(in, line))
      if (!line.empty() && line[0] != '#' && line[0] != 'c') ++rows;
    CHECK(rows == 2);  // one channel at two strengths
  }

  REQUIRE(run(fx.with_config("sweep --kind shots")) == 0);
  CHECK(fs::exists(fx.out / "shots_sweep.csv"));

  // Hardware-style counts synthesized from the trained model.
  const auto trained =
      train::load_params_json((fx.out / "params.json").string());
  const model::CircuitLayout layout{2, 1};
  SeededRng rng(23);
  std::vector<model::EncodedSample> samples;
  for (int i = 0; i < 30; ++i)
    samples.push_back(model::encode_sample(
        synthetic::raw_features(rng, i >= 15, 2, 0.02),
        i >= 15 ? Label::fraud : Label::non_fraud, "j" + std::to_string(i),
        layout));
  const auto jobs = synthetic::make_jobs(
      trained.params, samples, layout, {noise::NoiseKind::depolarizing, 0.2},
      noise::NoisePlacement::final_only, 512, 23);
  const fs::path counts_path = fx.dir / "counts.json";
  hwfeat::save_jobs_json(counts_path.string(), jobs);

  REQUIRE(run(fx.with_config("hw-classify") + " --counts " +
              counts_path.string()) == 0);
  CHECK(fs::exists(fx.out / "hw_model.json"));
  CHECK(fs::exists(fx.out / "hw_metrics.json"));
  const std::string hw_metrics = read_file(fx.out / "hw_metrics.json");
  CHECK(hw_metrics.find("\"in_sample\"") != std::string::npos);
  CHECK(hw_metrics.find("\"holdout\"") != std::string::npos);
}

TEST_CASE("identical invocations write identical bytes") {
  CliFixture fx;
  REQUIRE(run(fx.with_config("prepare")) == 0);
  const std::string reduced_first = read_file(fx.out / "reduced.csv");
  REQUIRE(run(fx.with_config("prepare")) == 0);
  CHECK(read_file(fx.out / "reduced.csv") == reduced_first);

  REQUIRE(run(fx.with_config("train")) == 0);
  const std::string params_first = read_file(fx.out / "params.json");
  const std::string history_first = read_file(fx.out / "history.csv");
  REQUIRE(run(fx.with_config("train")) == 0);
  CHECK(read_file(fx.out / "params.json") == params_first);
  CHECK(read_file(fx.out / "history.csv") == history_first);

  REQUIRE(run(fx.with_config("evaluate")) == 0);
  const std::string fid_first = read_file(fx.out / "fidelities.csv");
  REQUIRE(run(fx.with_config("evaluate")) == 0);
  CHECK(read_file(fx.out / "fidelities.csv") == fid_first);

  // A different seed changes the training artifacts.
  REQUIRE(run(fx.with_config("train") + " --seed 9") == 0);
  CHECK(read_file(fx.out / "params.json") != params_first);
}

TEST_CASE("dotted overrides rewrite config fields") {
  CliFixture fx;
  REQUIRE(run(fx.with_config("prepare")) == 0);
  // Epoch count override shrinks the history to the new length.
  REQUIRE(run(fx.with_config("train") + " --train.epochs 2") == 0);
  std::ifstream in(fx.out / "history.csv");
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 2 + 2);
}

TEST_CASE("failure modes exit with the contract codes") {
  CliFixture fx;

  CHECK(run("") == 2);                       // missing subcommand
  CHECK(run("--help") == 0);
  CHECK(run("prepare --help") == 0);
  CHECK(run("sweep --config " + fx.config.string() + " --kind banana") == 2);
  CHECK(run("prepare --config " + (fx.dir / "nope.json").string()) == 2);

  // Dataset path that does not exist: exit 2, message names the path.
  const fs::path missing_cfg = fx.dir / "missing_dataset.json";
  std::ofstream(missing_cfg) << R"({"dataset": ")" << (fx.dir / "gone.csv").string()
                             << R"(", "out_dir": ")" << (fx.dir / "o2").string()
                             << R"("})";
  CHECK(run("prepare --config " + missing_cfg.string()) == 2);
  const std::string message =
      capture_stderr("prepare --config " + missing_cfg.string(), fx.dir);
  CHECK(message.find("gone.csv") != std::string::npos);

  // evaluate before prepare/train: the missing artifact is reported.
  const fs::path fresh_out = fx.dir / "fresh";
  CHECK(run(fx.with_config("evaluate") + " --out " + fresh_out.string()) == 2);

  // Unknown config key.
  const fs::path bad_key = fx.dir / "bad_key.json";
  std::ofstream(bad_key) << R"({"dataset": "x.csv", "qubits": 4})";
  CHECK(run("prepare --config " + bad_key.string()) == 2);

  // Malformed JSON.
  const fs::path bad_json = fx.dir / "bad.json";
  std::ofstream(bad_json) << "{ not json";
  CHECK(run("prepare --config " + bad_json.string()) == 2);

  // Malformed counts file.
  const fs::path bad_counts = fx.dir / "bad_counts.json";
  std::ofstream(bad_counts) << R"([{"job_id":"x","label":0,"counts":{"01":2,"1":1}}])";
  CHECK(run(fx.with_config("hw-classify") + " --counts " +
            bad_counts.string()) == 2);

  // Invalid geometry: k must equal 2^n_qubits.
  CHECK(run(fx.with_config("prepare") + " --k 8") == 2);
}
