// SPDX-License-Identifier: Apache-2.0
#include "fidqae/train.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace fidqae::train {

using model::AnsatzParameters;
using model::CircuitLayout;
using model::EncodedSample;
using nlohmann::json;

std::string to_string(GradientMode mode) {
  return mode == GradientMode::parameter_shift ? "parameter_shift"
                                               : "finite_difference";
}

std::string to_string(FidelityMode mode) {
  return mode == FidelityMode::exact ? "exact" : "sampled";
}

GradientMode gradient_mode_from_string(const std::string& name) {
  if (name == "parameter_shift") return GradientMode::parameter_shift;
  if (name == "finite_difference") return GradientMode::finite_difference;
  throw std::invalid_argument("unknown gradient mode: " + name);
}

FidelityMode fidelity_mode_from_string(const std::string& name) {
  if (name == "exact") return FidelityMode::exact;
  if (name == "sampled") return FidelityMode::sampled;
  throw std::invalid_argument("unknown fidelity mode: " + name);
}

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (batch_size < 1)
    throw std::invalid_argument("train: batch_size must be >= 1");
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("train: learning_rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw std::invalid_argument("train: Adam betas must lie in [0, 1)");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("train: Adam epsilon must be positive");
  if (fidelity_mode == FidelityMode::sampled && shots < 1)
    throw std::invalid_argument("train: sampled mode needs shots >= 1");
  if (fidelity_mode == FidelityMode::sampled &&
      gradient_mode == GradientMode::parameter_shift)
    throw std::invalid_argument(
        "train: parameter_shift gradients require exact fidelity mode "
        "(mode mismatch)");
}

double cost(const AnsatzParameters& params,
            std::span<const EncodedSample> batch, const CircuitLayout& layout,
            const FidelityEvalOptions& eval) {
  if (batch.empty()) throw std::invalid_argument("cost: empty batch");
  double sum = 0.0;
  if (eval.mode == FidelityMode::exact) {
    const auto gates = model::build_ansatz(params, layout);
    for (const EncodedSample& s : batch)
      sum += 1.0 - model::trash_fidelity_exact(gates, s, layout);
  } else {
    if (eval.shots < 1)
      throw std::invalid_argument("cost: sampled mode needs shots >= 1");
    for (std::size_t i = 0; i < batch.size(); ++i)
      sum += 1.0 - model::swap_test_fidelity_sampled(
                       params, batch[i], layout, eval.shots,
                       derive_seed(eval.seed, i));
  }
  return sum / static_cast<double>(batch.size());
}

Eigen::VectorXd gradient(const AnsatzParameters& params,
                         std::span<const EncodedSample> batch,
                         const CircuitLayout& layout, const TrainConfig& config,
                         std::uint64_t eval_seed) {
  if (batch.empty()) throw std::invalid_argument("gradient: empty batch");
  if (config.gradient_mode == GradientMode::parameter_shift &&
      config.fidelity_mode != FidelityMode::exact)
    throw std::invalid_argument(
        "gradient: parameter_shift requires exact fidelity mode "
        "(mode mismatch)");

  const double shift =
      config.gradient_mode == GradientMode::parameter_shift ? M_PI / 2.0 : 1e-5;
  const double denom =
      config.gradient_mode == GradientMode::parameter_shift ? 2.0 : 2e-5;

  const Eigen::Index n = params.theta.size();
  Eigen::VectorXd grad(n);
  // 2n independent shifted evaluations; each is internally sequential over
  // the batch, so results do not depend on the thread count.
  std::vector<double> shifted(static_cast<std::size_t>(2 * n), 0.0);
  parallel_for(static_cast<std::size_t>(2 * n), [&](std::size_t task) {
    const Eigen::Index k = static_cast<Eigen::Index>(task / 2);
    const double sign = (task % 2 == 0) ? 1.0 : -1.0;
    Eigen::VectorXd theta = params.theta;
    theta(k) += sign * shift;
    FidelityEvalOptions eval;
    eval.mode = config.fidelity_mode;
    eval.shots = config.shots;
    eval.seed = derive_seed(eval_seed, task);
    shifted[task] =
        cost(AnsatzParameters(std::move(theta)), batch, layout, eval);
  });
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto base = static_cast<std::size_t>(2 * k);
    grad(k) = (shifted[base] - shifted[base + 1]) / denom;
  }
  return grad;
}

AdamState AdamState::zeros(Eigen::Index size) {
  AdamState s;
  s.m = Eigen::VectorXd::Zero(size);
  s.v = Eigen::VectorXd::Zero(size);
  s.t = 0;
  return s;
}

std::pair<AnsatzParameters, AdamState> adam_step(const AnsatzParameters& params,
                                                 const Eigen::VectorXd& grad,
                                                 AdamState state,
                                                 const TrainConfig& config) {
  config.validate();
  if (grad.size() != params.theta.size() || state.m.size() != grad.size() ||
      state.v.size() != grad.size())
    throw std::invalid_argument("adam_step: size mismatch");
  if (!grad.allFinite())
    throw std::invalid_argument("adam_step: non-finite gradient entry");

  state.t += 1;
  state.m = config.beta1 * state.m + (1.0 - config.beta1) * grad;
  state.v = config.beta2 * state.v +
            (1.0 - config.beta2) * grad.cwiseProduct(grad);
  const double bias1 = 1.0 - std::pow(config.beta1, state.t);
  const double bias2 = 1.0 - std::pow(config.beta2, state.t);
  const Eigen::VectorXd m_hat = state.m / bias1;
  const Eigen::VectorXd v_hat = state.v / bias2;
  Eigen::VectorXd theta =
      params.theta -
      config.learning_rate *
          (m_hat.array() / (v_hat.array().sqrt() + config.epsilon)).matrix();
  return {AnsatzParameters(std::move(theta)), std::move(state)};
}

namespace {

double mean_fidelity_for_history(const AnsatzParameters& params,
                                 std::span<const EncodedSample> samples,
                                 const CircuitLayout& layout,
                                 const TrainConfig& config,
                                 std::uint64_t eval_seed) {
  if (samples.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (config.fidelity_mode == FidelityMode::exact)
    return model::mean_trash_fidelity(params, samples, layout);
  std::vector<double> f(samples.size(), 0.0);
  parallel_for(samples.size(), [&](std::size_t i) {
    f[i] = model::swap_test_fidelity_sampled(params, samples[i], layout,
                                             config.shots,
                                             derive_seed(eval_seed, i));
  });
  return std::accumulate(f.begin(), f.end(), 0.0) /
         static_cast<double>(f.size());
}

}  // namespace

TrainResult train_loop(const TrainConfig& config,
                       std::span<const EncodedSample> train_nonfraud,
                       std::span<const EncodedSample> test_nonfraud,
                       std::span<const EncodedSample> test_fraud,
                       const CircuitLayout& layout) {
  config.validate();
  layout.validate();
  if (train_nonfraud.empty())
    throw std::invalid_argument("train_loop: empty training set");
  for (const EncodedSample& s : train_nonfraud)
    if (s.label && *s.label == Label::fraud)
      throw std::invalid_argument(
          "train_loop: fraud sample in training set (id " + s.id +
          "); fraud data is evaluation-only");

  AnsatzParameters params =
      AnsatzParameters::random_init(layout, config.seed);
  AdamState adam = AdamState::zeros(params.theta.size());

  std::vector<std::size_t> order(train_nonfraud.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result{params, {}};
  result.history.epochs.reserve(static_cast<std::size_t>(config.epochs));

  std::vector<EncodedSample> batch;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    SeededRng shuffle_rng(
        derive_seed(config.seed, 0x5F, static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);

    std::size_t cursor = 0;
    int batch_index = 0;
    while (cursor < order.size()) {
      const std::size_t take =
          std::min(static_cast<std::size_t>(config.batch_size),
                   order.size() - cursor);
      batch.clear();
      for (std::size_t k = 0; k < take; ++k)
        batch.push_back(train_nonfraud[order[cursor + k]]);
      cursor += take;

      const std::uint64_t eval_seed =
          derive_seed(config.seed, static_cast<std::uint64_t>(epoch),
                      static_cast<std::uint64_t>(batch_index));
      const Eigen::VectorXd g =
          gradient(params, batch, layout, config, eval_seed);
      std::tie(params, adam) = adam_step(params, g, std::move(adam), config);
      ++batch_index;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_fidelity_mean = mean_fidelity_for_history(
        params, train_nonfraud, layout, config,
        derive_seed(config.seed, 0xA11, static_cast<std::uint64_t>(epoch)));
    stats.test_nonfraud_fidelity_mean = mean_fidelity_for_history(
        params, test_nonfraud, layout, config,
        derive_seed(config.seed, 0xB22, static_cast<std::uint64_t>(epoch)));
    stats.test_fraud_fidelity_mean = mean_fidelity_for_history(
        params, test_fraud, layout, config,
        derive_seed(config.seed, 0xC33, static_cast<std::uint64_t>(epoch)));
    stats.train_loss = 1.0 - stats.train_fidelity_mean;
    stats.test_loss = 1.0 - stats.test_nonfraud_fidelity_mean;
    result.history.epochs.push_back(stats);
  }

  result.params = std::move(params);
  return result;
}

namespace {

json config_to_json(const TrainConfig& c) {
  return json{{"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"learning_rate", c.learning_rate},
              {"beta1", c.beta1},
              {"beta2", c.beta2},
              {"epsilon", c.epsilon},
              {"seed", c.seed},
              {"gradient_mode", to_string(c.gradient_mode)},
              {"fidelity_mode", to_string(c.fidelity_mode)},
              {"shots", c.shots}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.beta1 = j.value("beta1", 0.9);
  c.beta2 = j.value("beta2", 0.999);
  c.epsilon = j.value("epsilon", 1e-8);
  c.seed = j.at("seed").get<std::uint64_t>();
  c.gradient_mode =
      gradient_mode_from_string(j.at("gradient_mode").get<std::string>());
  c.fidelity_mode =
      fidelity_mode_from_string(j.at("fidelity_mode").get<std::string>());
  c.shots = j.value("shots", 1024LL);
  return c;
}

}  // namespace

void save_params_json(const std::string& path, const TrainedModel& m) {
  json j;
  j["layout"] = {{"n_data", m.layout.n_data}, {"n_trash", m.layout.n_trash}};
  j["theta"] = std::vector<double>(m.params.theta.data(),
                                   m.params.theta.data() + m.params.theta.size());
  j["config"] = config_to_json(m.config);
  j["final_epoch"] = m.final_epoch;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write params file: " + path);
  out << j.dump(2) << "\n";
}

TrainedModel load_params_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open params file: " + path);
  json j = json::parse(in);
  TrainedModel m;
  m.layout.n_data = j.at("layout").at("n_data").get<int>();
  m.layout.n_trash = j.at("layout").at("n_trash").get<int>();
  m.layout.validate();
  const auto theta = j.at("theta").get<std::vector<double>>();
  m.params = model::AnsatzParameters(Eigen::Map<const Eigen::VectorXd>(
      theta.data(), static_cast<Eigen::Index>(theta.size())));
  if (m.params.theta.size() != model::AnsatzParameters::expected_size(m.layout))
    throw std::runtime_error("params file theta length does not match layout");
  m.config = config_from_json(j.at("config"));
  m.final_epoch = j.at("final_epoch").get<int>();
  return m;
}

void save_history_csv(const std::string& path, const TrainHistory& history,
                      const std::string& metadata) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write history file: " + path);
  if (!metadata.empty()) out << "# " << metadata << "\n";
  out << "epoch,train_loss,test_loss,train_fidelity_mean,"
         "test_nonfraud_fidelity_mean,test_fraud_fidelity_mean\n";
  char buf[512];
  for (const EpochStats& e : history.epochs) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  e.epoch, e.train_loss, e.test_loss, e.train_fidelity_mean,
                  e.test_nonfraud_fidelity_mean, e.test_fraud_fidelity_mean);
    out << buf;
  }
}

}  // namespace fidqae::train
