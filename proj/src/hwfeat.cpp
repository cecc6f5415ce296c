// SPDX-License-Identifier: Apache-2.0
#include "fidqae/hwfeat.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace fidqae::hwfeat {

using nlohmann::json;

namespace {

void validate_histogram(const qsim::CountsHistogram& h,
                        const std::string& job_id) {
  if (h.counts.empty())
    throw std::invalid_argument("job " + job_id + ": empty counts");
  long long sum = 0;
  for (const auto& [key, count] : h.counts) {
    if (count < 0)
      throw std::invalid_argument("job " + job_id + ": negative count");
    if (key.size() != static_cast<std::size_t>(h.num_qubits))
      throw std::invalid_argument("job " + job_id +
                                  ": bitstring length mismatch");
    for (char c : key)
      if (c != '0' && c != '1')
        throw std::invalid_argument("job " + job_id + ": bad bitstring key");
    sum += count;
  }
  if (sum != h.total_shots || sum <= 0)
    throw std::invalid_argument("job " + job_id +
                                ": counts do not sum to total shots");
}

}  // namespace

std::vector<JobRecord> load_jobs_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open counts file: " + path);
  json doc = json::parse(in);  // parse errors carry line/column context
  if (!doc.is_array())
    throw std::invalid_argument("counts file must be a JSON array of jobs");
  if (doc.empty())
    throw std::invalid_argument("counts file contains no jobs");

  std::vector<JobRecord> jobs;
  jobs.reserve(doc.size());
  for (const json& item : doc) {
    JobRecord job;
    job.job_id = item.at("job_id").get<std::string>();
    job.label = label_from_int(item.at("label").get<int>());
    const json& counts = item.at("counts");
    if (!counts.is_object() || counts.empty())
      throw std::invalid_argument("job " + job.job_id +
                                  ": counts must be a non-empty object");
    long long total = 0;
    int width = -1;
    for (const auto& [key, value] : counts.items()) {
      const long long c = value.get<long long>();
      if (width < 0) width = static_cast<int>(key.size());
      job.counts.counts[key] = c;
      total += c;
    }
    job.counts.num_qubits = width;
    job.counts.total_shots = total;
    validate_histogram(job.counts, job.job_id);
    jobs.push_back(std::move(job));
  }
  return jobs;
}

void save_jobs_json(const std::string& path, std::span<const JobRecord> jobs) {
  json arr = json::array();
  for (const JobRecord& job : jobs) {
    json counts = json::object();
    for (const auto& [key, count] : job.counts.counts) counts[key] = count;
    arr.push_back({{"job_id", job.job_id},
                   {"label", label_to_int(job.label)},
                   {"counts", counts}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write counts file: " + path);
  out << arr.dump(2) << "\n";
}

double fidelity_feature(const qsim::CountsHistogram& counts,
                        const std::string& reference_bitstring) {
  if (reference_bitstring.size() != static_cast<std::size_t>(counts.num_qubits))
    throw std::invalid_argument(
        "fidelity_feature: reference bitstring length mismatch");
  if (counts.total_shots <= 0)
    throw std::invalid_argument("fidelity_feature: no shots recorded");
  const auto it = counts.counts.find(reference_bitstring);
  if (it == counts.counts.end()) return 0.0;
  return static_cast<double>(it->second) /
         static_cast<double>(counts.total_shots);
}

double entropy_feature(const qsim::CountsHistogram& counts) {
  if (counts.total_shots <= 0)
    throw std::invalid_argument("entropy_feature: no shots recorded");
  double h = 0.0;
  for (const auto& [key, count] : counts.counts) {
    if (count <= 0) continue;
    const double p = static_cast<double>(count) /
                     static_cast<double>(counts.total_shots);
    h -= p * std::log2(p);
  }
  return h;
}

FeaturePair extract_features(const qsim::CountsHistogram& counts,
                             const std::string& reference_bitstring) {
  return FeaturePair{fidelity_feature(counts, reference_bitstring),
                     entropy_feature(counts)};
}

double LogisticModel::score(const FeaturePair& f) const {
  const double z = weights(0) * f.fidelity + weights(1) * f.entropy + bias;
  return 1.0 / (1.0 + std::exp(-z));
}

LogisticModel fit_logistic(std::span<const FeaturePair> features,
                           std::span<const Label> labels,
                           const LogisticFitConfig& config) {
  if (features.size() != labels.size() || features.empty())
    throw std::invalid_argument("fit_logistic: feature/label size mismatch");
  if (config.iterations < 1 || !(config.step > 0.0))
    throw std::invalid_argument("fit_logistic: bad fit configuration");
  const auto n = static_cast<Eigen::Index>(features.size());
  bool any_fraud = false, any_nonfraud = false;
  for (Label l : labels) (l == Label::fraud ? any_fraud : any_nonfraud) = true;
  if (!any_fraud || !any_nonfraud)
    throw std::invalid_argument("fit_logistic: both classes required");

  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = features[static_cast<std::size_t>(i)].fidelity;
    x(i, 1) = features[static_cast<std::size_t>(i)].entropy;
    y(i) = labels[static_cast<std::size_t>(i)] == Label::fraud ? 1.0 : 0.0;
  }

  // Internal z-score standardization; constant features keep scale 1 so
  // their (useless) weight stays finite.
  Eigen::Vector2d mean = x.colwise().mean();
  Eigen::Vector2d scale;
  for (int c = 0; c < 2; ++c) {
    const double var =
        (x.col(c).array() - mean(c)).square().sum() / static_cast<double>(n);
    scale(c) = var > 0.0 ? std::sqrt(var) : 1.0;
    x.col(c) = (x.col(c).array() - mean(c)) / scale(c);
  }

  Eigen::Vector2d w = Eigen::Vector2d::Zero();
  double b = 0.0;
  LogisticModel model;
  model.log_likelihood_history.reserve(
      static_cast<std::size_t>(config.iterations));
  Eigen::VectorXd s(n);
  for (int it = 0; it < config.iterations; ++it) {
    s = 1.0 / (1.0 + (-(x * w).array() - b).exp());
    const Eigen::VectorXd residual = y - s;
    w += config.step * (x.transpose() * residual) / static_cast<double>(n);
    b += config.step * residual.mean();

    s = 1.0 / (1.0 + (-(x * w).array() - b).exp());
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      constexpr double floor = 1e-300;  // guards log of a saturated sigmoid
      ll += y(i) * std::log(std::max(s(i), floor)) +
            (1.0 - y(i)) * std::log(std::max(1.0 - s(i), floor));
    }
    model.log_likelihood_history.push_back(ll / static_cast<double>(n));
  }

  // De-standardize: w.x_std + b == (w/scale).x + (b - w.mean/scale).
  model.weights = (w.array() / scale.array()).matrix();
  model.bias = b - (w.array() * mean.array() / scale.array()).sum();
  model.final_log_likelihood = model.log_likelihood_history.back();
  return model;
}

YoudenResult youden_threshold(std::span<const double> scores,
                              std::span<const Label> labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw std::invalid_argument("youden_threshold: size mismatch");
  long long n_fraud = 0, n_nonfraud = 0;
  for (Label l : labels) (l == Label::fraud ? n_fraud : n_nonfraud) += 1;
  if (n_fraud == 0 || n_nonfraud == 0)
    throw std::invalid_argument("youden_threshold: both classes required");

  std::set<double> unique_scores(scores.begin(), scores.end());
  std::vector<double> candidates{0.0, 1.0};
  for (auto it = unique_scores.begin(); it != unique_scores.end(); ++it) {
    auto next = std::next(it);
    if (next != unique_scores.end()) candidates.push_back((*it + *next) / 2.0);
  }
  std::sort(candidates.begin(), candidates.end());

  YoudenResult best{candidates.front(), -2.0};
  for (double tau : candidates) {
    long long tp = 0, fp = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= tau)
        (labels[i] == Label::fraud ? tp : fp) += 1;
    }
    const double tpr = static_cast<double>(tp) / static_cast<double>(n_fraud);
    const double fpr =
        static_cast<double>(fp) / static_cast<double>(n_nonfraud);
    const double j = tpr - fpr;
    if (j > best.j) best = YoudenResult{tau, j};  // ties keep smaller tau
  }
  return best;
}

LogisticModel fit_jobs(std::span<const JobRecord> jobs,
                       const std::string& reference_bitstring,
                       const LogisticFitConfig& config) {
  if (jobs.empty()) throw std::invalid_argument("fit_jobs: no jobs");
  std::vector<FeaturePair> features;
  std::vector<Label> labels;
  features.reserve(jobs.size());
  labels.reserve(jobs.size());
  for (const JobRecord& job : jobs) {
    features.push_back(extract_features(job.counts, reference_bitstring));
    labels.push_back(job.label);
  }
  LogisticModel model = fit_logistic(features, labels, config);
  model.reference_bitstring = reference_bitstring;
  std::vector<double> scores;
  scores.reserve(jobs.size());
  for (const FeaturePair& f : features) scores.push_back(model.score(f));
  const YoudenResult youden = youden_threshold(scores, labels);
  model.threshold = youden.threshold;
  model.youden_j = youden.j;
  return model;
}

classify::MetricsReport evaluate_jobs(std::span<const JobRecord> jobs,
                                      const LogisticModel& model) {
  if (jobs.empty()) throw std::invalid_argument("evaluate_jobs: no jobs");
  long long tp = 0, tn = 0, fp = 0, fn = 0;
  for (const JobRecord& job : jobs) {
    const double s =
        model.score(extract_features(job.counts, model.reference_bitstring));
    const bool predicted_fraud = s >= model.threshold;
    if (job.label == Label::fraud) {
      predicted_fraud ? ++tp : ++fn;
    } else {
      predicted_fraud ? ++fp : ++tn;
    }
  }
  return classify::metrics_from_confusion(tp, tn, fp, fn, model.threshold);
}

JobSplit split_jobs(std::span<const JobRecord> jobs, double train_fraction,
                    std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("split_jobs: train_fraction must be in (0, 1)");
  std::vector<std::size_t> fraud_idx, nonfraud_idx;
  for (std::size_t i = 0; i < jobs.size(); ++i)
    (jobs[i].label == Label::fraud ? fraud_idx : nonfraud_idx).push_back(i);

  JobSplit split;
  SeededRng rng(seed);
  for (auto* group : {&nonfraud_idx, &fraud_idx}) {
    rng.shuffle(*group);
    const auto take = static_cast<std::size_t>(
        std::lround(train_fraction * static_cast<double>(group->size())));
    for (std::size_t k = 0; k < group->size(); ++k)
      (k < take ? split.train : split.holdout).push_back(jobs[(*group)[k]]);
  }
  return split;
}

std::string model_to_json(const LogisticModel& model) {
  json j{{"weights",
          {{"fidelity", model.weights(0)}, {"entropy", model.weights(1)}}},
         {"bias", model.bias},
         {"reference_bitstring", model.reference_bitstring},
         {"threshold", model.threshold},
         {"youden_j", model.youden_j},
         {"final_log_likelihood", model.final_log_likelihood}};
  return j.dump(2);
}

}  // namespace fidqae::hwfeat
