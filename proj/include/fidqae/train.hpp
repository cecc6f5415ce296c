// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fidqae/model.hpp"

namespace fidqae::train {

enum class GradientMode { parameter_shift, finite_difference };
enum class FidelityMode { exact, sampled };

std::string to_string(GradientMode mode);
std::string to_string(FidelityMode mode);
GradientMode gradient_mode_from_string(const std::string& name);
FidelityMode fidelity_mode_from_string(const std::string& name);

struct TrainConfig {
  int epochs = 100;
  int batch_size = 64;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 42;
  GradientMode gradient_mode = GradientMode::parameter_shift;
  FidelityMode fidelity_mode = FidelityMode::exact;
  long long shots = 1024;  // sampled fidelity mode only

  void validate() const;
};

/// How a single fidelity is evaluated inside cost/history computations.
/// In sampled mode each sample's SWAP-test draw gets an independent seed
/// derived from `seed` and the sample's index, keeping runs reproducible.
struct FidelityEvalOptions {
  FidelityMode mode = FidelityMode::exact;
  long long shots = 0;
  std::uint64_t seed = 0;
};

/// L(theta) = (1/N) * sum_i (1 - F_i) over the batch. Empty batch is an error.
double cost(const model::AnsatzParameters& params,
            std::span<const model::EncodedSample> batch,
            const model::CircuitLayout& layout,
            const FidelityEvalOptions& eval = {});

/// Gradient of `cost` in theta. parameter_shift uses the exact +-pi/2 rule
/// (every parameter feeds exactly one rotation, so the rule is exact) and
/// requires exact fidelity mode; finite_difference uses central differences
/// with h = 1e-5. `eval_seed` feeds sampled-mode evaluations only.
Eigen::VectorXd gradient(const model::AnsatzParameters& params,
                         std::span<const model::EncodedSample> batch,
                         const model::CircuitLayout& layout,
                         const TrainConfig& config,
                         std::uint64_t eval_seed = 0);

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long t = 0;

  static AdamState zeros(Eigen::Index size);
};

/// One Adam update with bias correction. Pure: returns the new parameters
/// and state. Rejects non-finite gradients and size mismatches.
std::pair<model::AnsatzParameters, AdamState> adam_step(
    const model::AnsatzParameters& params, const Eigen::VectorXd& grad,
    AdamState state, const TrainConfig& config);

/// Post-epoch evaluation snapshot. Losses satisfy
/// loss == 1 - corresponding mean fidelity exactly as computed.
struct EpochStats {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double test_loss = 0.0;
  double train_fidelity_mean = 0.0;
  double test_nonfraud_fidelity_mean = 0.0;
  double test_fraud_fidelity_mean = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
};

struct TrainResult {
  model::AnsatzParameters params;
  TrainHistory history;
};

/// Mini-batch Adam training on non-fraud data only; a fraud-labeled sample
/// in the train set is a hard error (fraud is evaluation-only). Each epoch
/// reshuffles with a seed derived from config.seed and the epoch number;
/// the final partial batch is kept. Test sets are evaluated after every
/// epoch; an empty test set records NaN means.
TrainResult train_loop(const TrainConfig& config,
                       std::span<const model::EncodedSample> train_nonfraud,
                       std::span<const model::EncodedSample> test_nonfraud,
                       std::span<const model::EncodedSample> test_fraud,
                       const model::CircuitLayout& layout);

/// Trained-model envelope persisted as JSON: layout, flat theta, the full
/// train config, and the number of completed epochs.
struct TrainedModel {
  model::CircuitLayout layout;
  model::AnsatzParameters params;
  TrainConfig config;
  int final_epoch = 0;
};

void save_params_json(const std::string& path, const TrainedModel& m);
TrainedModel load_params_json(const std::string& path);

/// One CSV row per epoch. `metadata` (if non-empty) is emitted first as a
/// `# ...` comment line, then the header.
void save_history_csv(const std::string& path, const TrainHistory& history,
                      const std::string& metadata = "");

}  // namespace fidqae::train
