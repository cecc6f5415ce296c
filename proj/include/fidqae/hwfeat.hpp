// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fidqae/classify.hpp"
#include "fidqae/qsim.hpp"

namespace fidqae::hwfeat {

/// One hardware execution: a labeled counts histogram.
struct JobRecord {
  std::string job_id;
  Label label = Label::non_fraud;
  qsim::CountsHistogram counts;
};

/// JSON array of {job_id, label: 0|1, counts: {bitstring: int}} objects.
/// Validation: keys are equal-length 0/1 strings and counts sum to the
/// recorded totals.
std::vector<JobRecord> load_jobs_json(const std::string& path);
void save_jobs_json(const std::string& path,
                    std::span<const JobRecord> jobs);

/// Empirical probability of the reference bitstring: counts[s*] / shots
/// (0 when the key never appeared).
double fidelity_feature(const qsim::CountsHistogram& counts,
                        const std::string& reference_bitstring);

/// Shannon entropy of the empirical outcome distribution, in bits, with
/// 0 * log2(0) = 0. Uniform over 2^m outcomes gives exactly m bits.
double entropy_feature(const qsim::CountsHistogram& counts);

struct FeaturePair {
  double fidelity = 0.0;
  double entropy = 0.0;
};

FeaturePair extract_features(const qsim::CountsHistogram& counts,
                             const std::string& reference_bitstring);

/// Two-feature logistic classifier score = sigmoid(w . (F, H) + b),
/// with the Youden-optimal decision threshold: fraud iff score >= tau.
struct LogisticModel {
  Eigen::Vector2d weights = Eigen::Vector2d::Zero();  // de-standardized
  double bias = 0.0;
  std::string reference_bitstring;
  double threshold = 0.5;
  double youden_j = 0.0;
  double final_log_likelihood = 0.0;
  /// Mean log-likelihood after each ascent iteration (diagnostic;
  /// non-decreasing for the fixed step size).
  std::vector<double> log_likelihood_history;

  double score(const FeaturePair& f) const;
};

struct LogisticFitConfig {
  double step = 0.1;
  int iterations = 5000;
};

/// Deterministic full-batch gradient ascent on the mean log-likelihood,
/// zero-initialized, with internal z-score standardization of both features
/// (weights are reported de-standardized). Requires both classes present.
LogisticModel fit_logistic(std::span<const FeaturePair> features,
                           std::span<const Label> labels,
                           const LogisticFitConfig& config = {});

/// Youden's J threshold over score midpoints plus {0, 1}: maximizes
/// TPR - FPR with the fraud-iff-score>=tau rule; ties take the smallest tau.
struct YoudenResult {
  double threshold = 0.0;
  double j = 0.0;
};
YoudenResult youden_threshold(std::span<const double> scores,
                              std::span<const Label> labels);

/// Fits on the given jobs and installs the Youden threshold.
LogisticModel fit_jobs(std::span<const JobRecord> jobs,
                       const std::string& reference_bitstring,
                       const LogisticFitConfig& config = {});

/// Scores every job and derives confusion metrics (fraud positive,
/// predicted fraud iff score >= model.threshold). The report's threshold
/// field carries the model's tau.
classify::MetricsReport evaluate_jobs(std::span<const JobRecord> jobs,
                                      const LogisticModel& model);

/// Deterministic stratified split for the labeled holdout evaluation.
struct JobSplit {
  std::vector<JobRecord> train;
  std::vector<JobRecord> holdout;
};
JobSplit split_jobs(std::span<const JobRecord> jobs, double train_fraction,
                    std::uint64_t seed);

std::string model_to_json(const LogisticModel& model);

}  // namespace fidqae::hwfeat
