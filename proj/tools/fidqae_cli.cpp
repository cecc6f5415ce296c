// SPDX-License-Identifier: Apache-2.0
//
// fidqae: anomaly detection on transaction tables with a fidelity-trained
// quantum autoencoder. Subcommands cover the full pipeline:
//
//   prepare      feature selection + scaling -> reduced.csv, selection.json
//   train        variational training        -> params.json, history.csv
//   evaluate     threshold sweep + stats     -> fidelities.csv, metrics.{csv,json},
//                                               distribution.json
//   sweep        --kind prevalence|noise|shots -> one CSV table per kind
//   hw-classify  counts-file logistic classifier -> hw_model.json, hw_metrics.json
//
// One JSON config drives everything; every field is overridable with a flag
// of the same dotted name (e.g. --train.epochs 5). Exit codes: 0 success,
// 2 usage or input error, 3 runtime error.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fidqae/classify.hpp"
#include "fidqae/common.hpp"
#include "fidqae/data.hpp"
#include "fidqae/hwfeat.hpp"
#include "fidqae/model.hpp"
#include "fidqae/noise.hpp"
#include "fidqae/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fidqae;

namespace {

json default_config() {
  return json{
      {"dataset", ""},
      {"out_dir", "out"},
      {"seed", 42},
      {"threads", 0},
      {"n_qubits", 4},
      {"n_trash", 1},
      {"k", 16},
      {"scale_all", false},
      {"split",
       {{"train_nonfraud", 2000},
        {"test_nonfraud", 1000},
        {"test_fraud_fraction", 1.0}}},
      {"train",
       {{"epochs", 100},
        {"batch_size", 64},
        {"learning_rate", 0.001},
        {"beta1", 0.9},
        {"beta2", 0.999},
        {"epsilon", 1e-8},
        {"gradient_mode", "parameter_shift"},
        {"fidelity_mode", "exact"},
        {"shots", 1024}}},
      {"thresholds", {0.40, 0.45, 0.50, 0.55, 0.65}},
      {"noise",
       {{"channels",
         {"bit_flip", "phase_flip", "depolarizing", "amplitude_damping",
          "phase_damping"}},
        {"probabilities", noise::probability_grid(11)},
        {"placement", "per_gate"},
        {"shots", 0}}},
      {"prevalence_fractions", {0.2, 0.4, 0.6, 0.8}},
      {"shots",
       {{"p", 0.5},
        {"grid", {256, 1024, 4096, 8192}},
        {"channels", {"amplitude_damping", "phase_damping"}}}},
      {"hw",
       {{"counts", ""},
        {"reference_bitstring", ""},
        {"train_fraction", 0.7},
        {"step", 0.1},
        {"iterations", 5000}}},
  };
}

// Rejects keys the schema does not know so typos fail loudly instead of
// silently keeping a default.
void check_keys(const json& schema, const json& provided,
                const std::string& prefix) {
  if (!provided.is_object())
    throw std::invalid_argument("config: expected an object at " +
                                (prefix.empty() ? std::string("top level")
                                                : prefix));
  for (const auto& [key, value] : provided.items()) {
    if (!schema.contains(key))
      throw std::invalid_argument("config: unknown key '" + prefix + key +
                                  "'");
    if (schema.at(key).is_object()) check_keys(schema.at(key), value, prefix + key + ".");
  }
}

// FNV-1a over the canonical config serialization; stamped into every
// artifact so outputs are traceable to the exact run configuration.
std::string config_hash_hex(const json& config) {
  const std::string text = config.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return std::string(buf);
}

// The typed view of the effective config used by the commands.
struct RunSettings {
  std::string dataset;
  fs::path out_dir;
  std::uint64_t seed = 42;
  int threads = 0;
  model::CircuitLayout layout;
  int k = 16;
  bool scale_all = false;
  data::SplitSpec split;
  train::TrainConfig train;
  std::vector<double> thresholds;
  std::vector<noise::NoiseKind> noise_channels;
  std::vector<double> noise_probabilities;
  noise::NoisePlacement placement = noise::NoisePlacement::per_gate;
  long long noise_shots = 0;
  std::vector<double> prevalence_fractions;
  double shots_p = 0.5;
  std::vector<long long> shot_grid;
  std::vector<noise::NoiseKind> shots_channels;
  std::string hw_counts;
  std::string hw_reference;
  double hw_train_fraction = 0.7;
  hwfeat::LogisticFitConfig hw_fit;

  std::string metadata;  // "config_hash=... seed=..." comment for CSVs
  std::string hash;
};

std::vector<noise::NoiseKind> parse_kinds(const json& names) {
  std::vector<noise::NoiseKind> kinds;
  for (const auto& name : names)
    kinds.push_back(noise::noise_kind_from_string(name.get<std::string>()));
  if (kinds.empty())
    throw std::invalid_argument("config: empty noise channel list");
  return kinds;
}

RunSettings settings_from_json(const json& cfg) {
  RunSettings s;
  s.dataset = cfg.at("dataset").get<std::string>();
  s.out_dir = cfg.at("out_dir").get<std::string>();
  s.seed = cfg.at("seed").get<std::uint64_t>();
  s.threads = cfg.at("threads").get<int>();
  s.layout.n_data = cfg.at("n_qubits").get<int>();
  s.layout.n_trash = cfg.at("n_trash").get<int>();
  s.layout.validate();
  s.k = cfg.at("k").get<int>();
  if (s.k != (1 << s.layout.n_data))
    throw std::invalid_argument(
        "config: k must equal 2^n_qubits (k=" + std::to_string(s.k) +
        ", n_qubits=" + std::to_string(s.layout.n_data) + ")");
  s.scale_all = cfg.at("scale_all").get<bool>();

  const json& split = cfg.at("split");
  s.split.train_nonfraud = split.at("train_nonfraud").get<Eigen::Index>();
  s.split.test_nonfraud = split.at("test_nonfraud").get<Eigen::Index>();
  s.split.test_fraud_fraction = split.at("test_fraud_fraction").get<double>();
  s.split.seed = s.seed;

  const json& tr = cfg.at("train");
  s.train.epochs = tr.at("epochs").get<int>();
  s.train.batch_size = tr.at("batch_size").get<int>();
  s.train.learning_rate = tr.at("learning_rate").get<double>();
  s.train.beta1 = tr.at("beta1").get<double>();
  s.train.beta2 = tr.at("beta2").get<double>();
  s.train.epsilon = tr.at("epsilon").get<double>();
  s.train.gradient_mode =
      train::gradient_mode_from_string(tr.at("gradient_mode").get<std::string>());
  s.train.fidelity_mode =
      train::fidelity_mode_from_string(tr.at("fidelity_mode").get<std::string>());
  s.train.shots = tr.at("shots").get<long long>();
  s.train.seed = s.seed;
  s.train.validate();

  s.thresholds = cfg.at("thresholds").get<std::vector<double>>();
  if (s.thresholds.empty())
    throw std::invalid_argument("config: empty threshold grid");

  const json& nz = cfg.at("noise");
  s.noise_channels = parse_kinds(nz.at("channels"));
  s.noise_probabilities = nz.at("probabilities").get<std::vector<double>>();
  s.placement =
      noise::placement_from_string(nz.at("placement").get<std::string>());
  s.noise_shots = nz.at("shots").get<long long>();

  s.prevalence_fractions =
      cfg.at("prevalence_fractions").get<std::vector<double>>();

  const json& sh = cfg.at("shots");
  s.shots_p = sh.at("p").get<double>();
  s.shot_grid = sh.at("grid").get<std::vector<long long>>();
  s.shots_channels = parse_kinds(sh.at("channels"));

  const json& hw = cfg.at("hw");
  s.hw_counts = hw.at("counts").get<std::string>();
  s.hw_reference = hw.at("reference_bitstring").get<std::string>();
  s.hw_train_fraction = hw.at("train_fraction").get<double>();
  s.hw_fit.step = hw.at("step").get<double>();
  s.hw_fit.iterations = hw.at("iterations").get<int>();

  s.hash = config_hash_hex(cfg);
  s.metadata = "config_hash=" + s.hash + " seed=" + std::to_string(s.seed);
  return s;
}

void require_file(const std::string& path, const char* what) {
  if (path.empty())
    throw std::invalid_argument(std::string(what) + " path is not set");
  if (!fs::exists(path))
    throw std::invalid_argument(std::string(what) + " not found: " + path);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text << "\n";
}

// Stamps traceability fields into a serialized JSON artifact.
std::string stamp_json(const std::string& payload, const RunSettings& s) {
  json j = json::parse(payload);
  j["config_hash"] = s.hash;
  j["seed"] = s.seed;
  return j.dump(2);
}

model::EncodedDataset encode_rows(const data::FeatureRows& rows,
                                  const model::CircuitLayout& layout) {
  std::vector<std::optional<Label>> labels(rows.labels.begin(),
                                           rows.labels.end());
  return model::encode_dataset(rows.features, labels, rows.ids, layout);
}

std::vector<classify::FidelityRecord> exact_records(
    const model::AnsatzParameters& params,
    std::span<const model::EncodedSample> samples,
    const model::CircuitLayout& layout) {
  const std::vector<qsim::GateOp> ansatz = model::build_ansatz(params, layout);
  std::vector<classify::FidelityRecord> records(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    records[i] = classify::FidelityRecord{
        samples[i].id, model::trash_fidelity_exact(ansatz, samples[i], layout),
        samples[i].label.value()};
  });
  return records;
}

// Loads the prepared cache and re-derives the deterministic splits.
struct EvalData {
  data::TransactionTable table;
  model::EncodedDataset train_nonfraud;
  model::EncodedDataset test_nonfraud;
  model::EncodedDataset test_fraud;
};

EvalData load_eval_data(const RunSettings& s,
                        const model::CircuitLayout& layout) {
  const fs::path reduced = s.out_dir / "reduced.csv";
  require_file(reduced.string(), "prepared dataset (run `prepare` first)");
  EvalData d;
  d.table = data::load_csv(reduced.string());
  if (d.table.cols() - 1 != layout.feature_dim())
    throw std::invalid_argument(
        "prepared dataset has " + std::to_string(d.table.cols() - 1) +
        " feature columns but the circuit expects " +
        std::to_string(layout.feature_dim()) +
        "; rerun `prepare` with a matching k");
  const data::Splits splits = data::make_splits(d.table, s.split);
  d.train_nonfraud = encode_rows(
      data::gather_rows(d.table, splits.train_nonfraud), layout);
  d.test_nonfraud =
      encode_rows(data::gather_rows(d.table, splits.test_nonfraud), layout);
  d.test_fraud =
      encode_rows(data::gather_rows(d.table, splits.test_fraud), layout);
  return d;
}

// Test partitions merged into one labeled record set (non-fraud first).
std::vector<model::EncodedSample> merged_test_samples(const EvalData& d) {
  std::vector<model::EncodedSample> all = d.test_nonfraud.samples;
  all.insert(all.end(), d.test_fraud.samples.begin(),
             d.test_fraud.samples.end());
  return all;
}

train::TrainedModel load_model(const RunSettings& s,
                               const std::string& params_flag) {
  const std::string path = params_flag.empty()
                               ? (s.out_dir / "params.json").string()
                               : params_flag;
  require_file(path, "trained parameters");
  return train::load_params_json(path);
}

int cmd_prepare(const RunSettings& s) {
  require_file(s.dataset, "dataset");
  data::TransactionTable table = data::load_csv(s.dataset);
  const long long fraud = table.fraud_count();
  std::printf("loaded %lld rows (%lld non-fraud, %lld fraud, %zu dropped)\n",
              static_cast<long long>(table.rows()),
              static_cast<long long>(table.rows()) - fraud, fraud,
              table.dropped_rows);

  const std::vector<std::string> flat = data::scale_columns(table, s.scale_all);
  for (const std::string& name : flat)
    std::printf("note: column %s has zero IQR; scaled by shift only\n",
                name.c_str());

  const data::SelectionReport report = data::rank_features(table, s.k);
  const data::TransactionTable reduced = data::select_features(table, report);

  fs::create_directories(s.out_dir);
  const fs::path reduced_path = s.out_dir / "reduced.csv";
  const fs::path selection_path = s.out_dir / "selection.json";
  data::save_csv(reduced_path.string(), reduced, s.metadata);
  write_text(selection_path,
             stamp_json(data::selection_report_to_json(report), s));

  std::printf("selected %d features:", report.k);
  for (const std::string& name : report.selected)
    std::printf(" %s", name.c_str());
  std::printf("\nwrote %s\nwrote %s\n", reduced_path.string().c_str(),
              selection_path.string().c_str());
  return 0;
}

int cmd_train(const RunSettings& s) {
  EvalData d = load_eval_data(s, s.layout);
  const std::size_t dropped = d.train_nonfraud.dropped_zero_norm +
                              d.test_nonfraud.dropped_zero_norm +
                              d.test_fraud.dropped_zero_norm;
  if (dropped > 0)
    std::printf("note: dropped %zu zero-norm rows before encoding\n", dropped);
  std::printf("training on %zu non-fraud rows (test: %zu non-fraud, %zu fraud)\n",
              d.train_nonfraud.samples.size(), d.test_nonfraud.samples.size(),
              d.test_fraud.samples.size());

  const train::TrainResult result =
      train::train_loop(s.train, d.train_nonfraud.samples,
                        d.test_nonfraud.samples, d.test_fraud.samples,
                        s.layout);
  const train::EpochStats& last = result.history.epochs.back();
  std::printf("epoch %d: train_loss=%.6f test_loss=%.6f "
              "F(test non-fraud)=%.6f F(test fraud)=%.6f\n",
              last.epoch, last.train_loss, last.test_loss,
              last.test_nonfraud_fidelity_mean,
              last.test_fraud_fidelity_mean);

  fs::create_directories(s.out_dir);
  const fs::path params_path = s.out_dir / "params.json";
  const fs::path history_path = s.out_dir / "history.csv";
  train::save_params_json(
      params_path.string(),
      train::TrainedModel{s.layout, result.params, s.train, last.epoch});
  train::save_history_csv(history_path.string(), result.history, s.metadata);
  std::printf("wrote %s\nwrote %s\n", params_path.string().c_str(),
              history_path.string().c_str());
  return 0;
}

int cmd_evaluate(const RunSettings& s, const std::string& params_flag) {
  const train::TrainedModel model = load_model(s, params_flag);
  const EvalData d = load_eval_data(s, model.layout);
  const std::vector<model::EncodedSample> samples = merged_test_samples(d);
  const std::vector<classify::FidelityRecord> records =
      exact_records(model.params, samples, model.layout);

  const std::vector<classify::MetricsReport> sweep =
      classify::threshold_sweep(records, s.thresholds);
  const classify::MetricsReport best =
      classify::best_f1_report(records, s.thresholds);
  const classify::DistributionStats stats =
      classify::distribution_stats(records);

  fs::create_directories(s.out_dir);
  const fs::path fid_path = s.out_dir / "fidelities.csv";
  const fs::path metrics_csv = s.out_dir / "metrics.csv";
  const fs::path metrics_json = s.out_dir / "metrics.json";
  const fs::path dist_path = s.out_dir / "distribution.json";
  classify::save_fidelity_records_csv(fid_path.string(), records, s.metadata);
  classify::save_metrics_csv(metrics_csv.string(), sweep, s.metadata);
  json mj{{"config_hash", s.hash},
          {"seed", s.seed},
          {"threshold_sweep", json::parse(classify::metrics_to_json(sweep))},
          {"best", json::parse(classify::metrics_to_json(
                       std::span(&best, 1)))[0]}};
  write_text(metrics_json, mj.dump(2));
  write_text(dist_path,
             stamp_json(classify::distribution_stats_to_json(stats), s));

  for (const classify::MetricsReport& r : sweep)
    std::printf("tau=%.2f acc=%.4f prec=%.4f rec=%.4f f1=%.4f mcc=%.4f%s\n",
                r.threshold, r.accuracy, r.precision, r.recall, r.f1, r.mcc,
                r.degenerate ? " (degenerate)" : "");
  std::printf("best tau=%.2f (f1=%.4f); separation: d=%.4f overlap=%.4f\n",
              best.threshold, best.f1, stats.cohens_d, stats.overlap);
  std::printf("wrote %s\nwrote %s\nwrote %s\nwrote %s\n",
              fid_path.string().c_str(), metrics_csv.string().c_str(),
              metrics_json.string().c_str(), dist_path.string().c_str());
  return 0;
}

int cmd_sweep(const RunSettings& s, const std::string& kind,
              const std::string& params_flag) {
  const train::TrainedModel model = load_model(s, params_flag);
  const EvalData d = load_eval_data(s, model.layout);
  fs::create_directories(s.out_dir);

  if (kind == "prevalence") {
    const std::vector<classify::FidelityRecord> nonfraud = exact_records(
        model.params, d.test_nonfraud.samples, model.layout);
    const std::vector<classify::FidelityRecord> fraud =
        exact_records(model.params, d.test_fraud.samples, model.layout);
    const std::vector<classify::PrevalenceRow> rows = classify::prevalence_sweep(
        nonfraud, fraud, s.prevalence_fractions, s.thresholds, s.seed);
    const fs::path path = s.out_dir / "prevalence.csv";
    classify::save_prevalence_csv(path.string(), rows, s.metadata);
    std::printf("wrote %s (%zu fractions x %zu thresholds)\n",
                path.string().c_str(), rows.size(), s.thresholds.size());
    return 0;
  }

  const std::vector<model::EncodedSample> samples = merged_test_samples(d);
  std::vector<noise::NoiseSweepCell> cells;
  fs::path path;
  if (kind == "noise") {
    cells = noise::noise_sweep(model.params, samples, model.layout,
                               s.noise_channels, s.noise_probabilities,
                               s.thresholds, s.placement, s.noise_shots,
                               s.seed);
    path = s.out_dir / "noise_sweep.csv";
  } else {  // "shots"; the flag check restricts to the three kinds
    cells = noise::shots_sweep(model.params, samples, model.layout,
                               s.shots_channels, s.shots_p, s.shot_grid,
                               s.thresholds, s.placement, s.seed);
    path = s.out_dir / "shots_sweep.csv";
  }
  noise::save_sweep_csv(path.string(), cells, s.metadata);
  std::printf("wrote %s (%zu cells)\n", path.string().c_str(), cells.size());
  return 0;
}

void print_hw_metrics(const char* tag, const classify::MetricsReport& r) {
  std::printf("%s: acc=%.4f prec=%.4f rec=%.4f f1=%.4f mcc=%.4f\n", tag,
              r.accuracy, r.precision, r.recall, r.f1, r.mcc);
}

int cmd_hw_classify(const RunSettings& s, const std::string& counts_flag) {
  const std::string counts_path =
      counts_flag.empty() ? s.hw_counts : counts_flag;
  require_file(counts_path, "counts file");
  const std::vector<hwfeat::JobRecord> jobs =
      hwfeat::load_jobs_json(counts_path);
  const std::string reference =
      s.hw_reference.empty()
          ? std::string(static_cast<std::size_t>(jobs.front().counts.num_qubits),
                        '0')
          : s.hw_reference;

  // In-sample: fit and score on the full job set. Holdout: refit on a
  // stratified split and score the held-out jobs.
  const hwfeat::LogisticModel in_model =
      hwfeat::fit_jobs(jobs, reference, s.hw_fit);
  const classify::MetricsReport in_metrics =
      hwfeat::evaluate_jobs(jobs, in_model);

  const hwfeat::JobSplit split =
      hwfeat::split_jobs(jobs, s.hw_train_fraction, s.seed);
  json holdout_model = nullptr;
  json holdout_metrics = nullptr;
  if (!split.holdout.empty()) {
    const hwfeat::LogisticModel ho_model =
        hwfeat::fit_jobs(split.train, reference, s.hw_fit);
    const classify::MetricsReport ho = hwfeat::evaluate_jobs(split.holdout,
                                                             ho_model);
    holdout_model = json::parse(hwfeat::model_to_json(ho_model));
    holdout_metrics =
        json::parse(classify::metrics_to_json(std::span(&ho, 1)))[0];
    print_hw_metrics("holdout  ", ho);
  }
  print_hw_metrics("in-sample", in_metrics);

  fs::create_directories(s.out_dir);
  const fs::path model_path = s.out_dir / "hw_model.json";
  const fs::path metrics_path = s.out_dir / "hw_metrics.json";
  json mj{{"config_hash", s.hash},
          {"seed", s.seed},
          {"in_sample", json::parse(hwfeat::model_to_json(in_model))},
          {"holdout", holdout_model}};
  json rj{{"config_hash", s.hash},
          {"seed", s.seed},
          {"in_sample", json::parse(classify::metrics_to_json(
                            std::span(&in_metrics, 1)))[0]},
          {"holdout", holdout_metrics}};
  write_text(model_path, mj.dump(2));
  write_text(metrics_path, rj.dump(2));
  std::printf("wrote %s\nwrote %s\n", model_path.string().c_str(),
              metrics_path.string().c_str());
  return 0;
}

// Registers one overridable config field as a CLI option; recorded values
// are written back into the JSON config after parsing.
class OverrideSet {
 public:
  template <typename T>
  CLI::Option* add(CLI::App& app, const std::string& flag,
                   const std::string& pointer, const std::string& desc) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app.add_option(flag, *value, desc);
    appliers_.push_back([opt, value, pointer](json& cfg) {
      if (opt->count() > 0) cfg[json::json_pointer(pointer)] = *value;
    });
    return opt;
  }

  template <typename T>
  CLI::Option* add_list(CLI::App& app, const std::string& flag,
                        const std::string& pointer, const std::string& desc) {
    return add<std::vector<T>>(app, flag, pointer, desc)->delimiter(',');
  }

  void apply(json& cfg) const {
    for (const auto& applier : appliers_) applier(cfg);
  }

 private:
  std::vector<std::function<void(json&)>> appliers_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fidelity-based quantum autoencoder for transaction anomaly "
               "detection"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file");

  OverrideSet ov;
  ov.add<std::string>(app, "--dataset", "/dataset", "input transaction CSV");
  ov.add<std::string>(app, "--out,--out_dir", "/out_dir", "output directory");
  ov.add<std::uint64_t>(app, "--seed", "/seed", "master RNG seed");
  ov.add<int>(app, "--threads", "/threads",
              "worker thread cap (0 = all cores)");
  ov.add<int>(app, "--n_qubits", "/n_qubits", "data qubits");
  ov.add<int>(app, "--n_trash", "/n_trash", "trash qubits");
  ov.add<int>(app, "--k", "/k", "selected feature count (= 2^n_qubits)");
  ov.add<bool>(app, "--scale_all", "/scale_all",
               "robust-scale every feature column");
  ov.add<long long>(app, "--split.train_nonfraud", "/split/train_nonfraud",
                    "non-fraud rows in the train split");
  ov.add<long long>(app, "--split.test_nonfraud", "/split/test_nonfraud",
                    "non-fraud rows in the test split");
  ov.add<double>(app, "--split.test_fraud_fraction",
                 "/split/test_fraud_fraction",
                 "fraction of fraud rows placed in the test split");
  ov.add<int>(app, "--train.epochs", "/train/epochs", "training epochs");
  ov.add<int>(app, "--train.batch_size", "/train/batch_size",
              "mini-batch size");
  ov.add<double>(app, "--train.learning_rate", "/train/learning_rate",
                 "Adam learning rate");
  ov.add<double>(app, "--train.beta1", "/train/beta1", "Adam beta1");
  ov.add<double>(app, "--train.beta2", "/train/beta2", "Adam beta2");
  ov.add<double>(app, "--train.epsilon", "/train/epsilon", "Adam epsilon");
  ov.add<std::string>(app, "--train.gradient_mode", "/train/gradient_mode",
                      "parameter_shift | finite_difference");
  ov.add<std::string>(app, "--train.fidelity_mode", "/train/fidelity_mode",
                      "exact | sampled");
  ov.add<long long>(app, "--train.shots", "/train/shots",
                    "shots per fidelity in sampled mode");
  ov.add_list<double>(app, "--thresholds", "/thresholds",
                      "classification threshold grid");
  ov.add_list<std::string>(app, "--noise.channels", "/noise/channels",
                           "noise channels to sweep");
  ov.add_list<double>(app, "--noise.probabilities", "/noise/probabilities",
                      "noise strengths to sweep");
  ov.add<std::string>(app, "--noise.placement", "/noise/placement",
                      "per_gate | per_layer | final_only");
  ov.add<long long>(app, "--noise.shots", "/noise/shots",
                    "shots per fidelity in the noise sweep (0 = exact)");
  ov.add_list<double>(app, "--prevalence_fractions", "/prevalence_fractions",
                      "fraud-pool fractions to sweep");
  ov.add<double>(app, "--shots.p", "/shots/p",
                 "noise strength for the shot sweep");
  ov.add_list<long long>(app, "--shots.grid", "/shots/grid",
                         "shot budgets to sweep");
  ov.add_list<std::string>(app, "--shots.channels", "/shots/channels",
                           "channels for the shot sweep");
  ov.add<std::string>(app, "--hw.counts", "/hw/counts",
                      "measurement counts JSON");
  ov.add<std::string>(app, "--hw.reference_bitstring",
                      "/hw/reference_bitstring",
                      "all-zeros reference outcome (default: derived)");
  ov.add<double>(app, "--hw.train_fraction", "/hw/train_fraction",
                 "stratified train fraction for the holdout model");
  ov.add<double>(app, "--hw.step", "/hw/step", "logistic ascent step");
  ov.add<int>(app, "--hw.iterations", "/hw/iterations",
              "logistic ascent iterations");

  CLI::App* prepare = app.add_subcommand(
      "prepare", "select and scale features into a reduced dataset");
  CLI::App* train_cmd =
      app.add_subcommand("train", "train the autoencoder on non-fraud rows");
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "score the test split across the threshold grid");
  CLI::App* sweep =
      app.add_subcommand("sweep", "prevalence, noise, or shot-budget sweep");
  CLI::App* hw = app.add_subcommand(
      "hw-classify", "fidelity/entropy logistic classifier on a counts file");

  std::string sweep_kind;
  sweep->add_option("--kind", sweep_kind, "prevalence | noise | shots")
      ->required()
      ->check(CLI::IsMember({"prevalence", "noise", "shots"}));
  std::string params_flag;
  evaluate->add_option("--params", params_flag,
                       "trained parameter JSON (default <out>/params.json)");
  sweep->add_option("--params", params_flag,
                    "trained parameter JSON (default <out>/params.json)");
  std::string counts_flag;
  hw->add_option("--counts", counts_flag,
                 "counts JSON path (overrides --hw.counts)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    json cfg = default_config();
    if (!config_path.empty()) {
      require_file(config_path, "config file");
      std::ifstream in(config_path);
      const json file_cfg = json::parse(in);
      check_keys(cfg, file_cfg, "");
      cfg.merge_patch(file_cfg);
    }
    ov.apply(cfg);
    const RunSettings settings = settings_from_json(cfg);
    set_max_threads(settings.threads);
    std::printf("config_hash=%s seed=%" PRIu64 "\n", settings.hash.c_str(),
                settings.seed);

    if (prepare->parsed()) return cmd_prepare(settings);
    if (train_cmd->parsed()) return cmd_train(settings);
    if (evaluate->parsed()) return cmd_evaluate(settings, params_flag);
    if (sweep->parsed()) return cmd_sweep(settings, sweep_kind, params_flag);
    if (hw->parsed()) return cmd_hw_classify(settings, counts_flag);
    std::fprintf(stderr, "error: no subcommand\n");
    return 2;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
