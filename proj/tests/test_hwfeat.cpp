// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "fidqae/common.hpp"
#include "fidqae/hwfeat.hpp"

using namespace fidqae;
namespace fs = std::filesystem;

namespace {

qsim::CountsHistogram histogram(
    std::initializer_list<std::pair<const char*, long long>> entries) {
  qsim::CountsHistogram h;
  for (const auto& [key, n] : entries) {
    h.num_qubits = static_cast<int>(std::string(key).size());
    h.total_shots += n;
    h.counts[key] = n;
  }
  return h;
}

hwfeat::JobRecord job(const std::string& id, Label label,
                      qsim::CountsHistogram counts) {
  hwfeat::JobRecord rec;
  rec.job_id = id;
  rec.label = label;
  rec.counts = std::move(counts);
  return rec;
}

// Separable two-class fixture: non-fraud jobs concentrate on "00", fraud
// jobs spread over the other outcomes.
std::vector<hwfeat::JobRecord> separable_jobs(int per_class) {
  std::vector<hwfeat::JobRecord> jobs;
  SeededRng rng(17);
  for (int i = 0; i < per_class; ++i) {
    const long long bulk = 90 + static_cast<long long>(rng.uniform_index(9));
    jobs.push_back(job("n" + std::to_string(i), Label::non_fraud,
                       histogram({{"00", bulk}, {"01", 100 - bulk}})));
    const long long spread = 30 + static_cast<long long>(rng.uniform_index(10));
    jobs.push_back(job("f" + std::to_string(i), Label::fraud,
                       histogram({{"00", 10},
                                  {"01", spread},
                                  {"10", 40},
                                  {"11", 50 - spread}})));
  }
  return jobs;
}

}  // namespace

TEST_CASE("job JSON round trip and validation") {
  const auto dir = fs::temp_directory_path() / "fidqae_hwfeat_test";
  fs::create_directories(dir);
  const std::string path = (dir / "jobs.json").string();

  std::vector<hwfeat::JobRecord> jobs{
      job("a", Label::non_fraud, histogram({{"00", 3}, {"11", 1}})),
      job("b", Label::fraud, histogram({{"01", 2}, {"10", 2}}))};
  hwfeat::save_jobs_json(path, jobs);
  const auto loaded = hwfeat::load_jobs_json(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].job_id == "a");
  CHECK(loaded[0].label == Label::non_fraud);
  CHECK(loaded[0].counts.counts.at("00") == 3);
  CHECK(loaded[1].label == Label::fraud);
  CHECK(loaded[1].counts.counts.at("10") == 2);

  const auto bad = (dir / "bad.json").string();
  std::ofstream(bad) << R"([{"job_id":"x","label":0,"counts":{"0a":3}}])";
  CHECK_THROWS_AS(hwfeat::load_jobs_json(bad), std::invalid_argument);
  std::ofstream(bad) << R"([{"job_id":"x","label":0,"counts":{"0":3,"11":1}}])";
  CHECK_THROWS_AS(hwfeat::load_jobs_json(bad), std::invalid_argument);
  std::ofstream(bad) << R"([{"job_id":"x","label":0,"counts":{}}])";
  CHECK_THROWS_AS(hwfeat::load_jobs_json(bad), std::invalid_argument);
  std::ofstream(bad) << R"([{"job_id":"x","label":3,"counts":{"0":1}}])";
  CHECK_THROWS_AS(hwfeat::load_jobs_json(bad), std::invalid_argument);
  std::ofstream(bad) << R"([{"job_id":"x","label":0,"counts":{"0":-1}}])";
  CHECK_THROWS_AS(hwfeat::load_jobs_json(bad), std::invalid_argument);
  std::ofstream(bad) << R"({"not":"an array"})";
  CHECK_THROWS_AS(hwfeat::load_jobs_json(bad), std::invalid_argument);
  CHECK_THROWS_AS(hwfeat::load_jobs_json((dir / "missing.json").string()),
                  std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("features match hand calculations on small histograms") {
  // 4 shots: {"00": 2, "01": 1, "11": 1}.
  const auto counts = histogram({{"00", 2}, {"01", 1}, {"11", 1}});
  CHECK(hwfeat::fidelity_feature(counts, "00") == 0.5);
  CHECK(hwfeat::fidelity_feature(counts, "01") == 0.25);
  CHECK(hwfeat::fidelity_feature(counts, "10") == 0.0);
  // H = -(1/2)log2(1/2) - 2 * (1/4)log2(1/4) = 1.5 exactly.
  CHECK(hwfeat::entropy_feature(counts) == 1.5);

  const auto pure = histogram({{"101", 7}});
  CHECK(hwfeat::fidelity_feature(pure, "101") == 1.0);
  CHECK(hwfeat::entropy_feature(pure) == 0.0);

  const auto uniform =
      histogram({{"00", 5}, {"01", 5}, {"10", 5}, {"11", 5}});
  CHECK(hwfeat::entropy_feature(uniform) == 2.0);

  const auto pair = hwfeat::extract_features(counts, "00");
  CHECK(pair.fidelity == 0.5);
  CHECK(pair.entropy == 1.5);

  CHECK_THROWS_AS(hwfeat::fidelity_feature(counts, "000"),
                  std::invalid_argument);
  CHECK_THROWS_AS(hwfeat::fidelity_feature(qsim::CountsHistogram{}, "00"),
                  std::invalid_argument);
}

TEST_CASE("entropy is bounded by the bitstring width") {
  SeededRng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    qsim::CountsHistogram counts;
    counts.num_qubits = 3;
    for (int k = 0; k < 4; ++k) {
      std::string key;
      for (int b = 0; b < 3; ++b)
        key += rng.uniform() < 0.5 ? '0' : '1';
      const long long n = 1 + static_cast<long long>(rng.uniform_index(50));
      counts.counts[key] += n;
      counts.total_shots += n;
    }
    const double h = hwfeat::entropy_feature(counts);
    CHECK(h >= 0.0);
    CHECK(h <= 3.0 + 1e-12);
  }
}

TEST_CASE("logistic fit separates the fixture and reports ascent history") {
  const auto jobs = separable_jobs(12);
  std::vector<hwfeat::FeaturePair> features;
  std::vector<Label> labels;
  for (const auto& j : jobs) {
    features.push_back(hwfeat::extract_features(j.counts, "00"));
    labels.push_back(j.label);
  }

  hwfeat::LogisticFitConfig config;
  config.iterations = 800;
  const auto model = hwfeat::fit_logistic(features, labels, config);
  REQUIRE(model.log_likelihood_history.size() == 800);
  for (std::size_t i = 1; i < model.log_likelihood_history.size(); ++i)
    CHECK(model.log_likelihood_history[i] >=
          model.log_likelihood_history[i - 1] - 1e-12);
  CHECK(model.final_log_likelihood == model.log_likelihood_history.back());

  // High fidelity must push toward non-fraud, so its weight is negative.
  CHECK(model.weights(0) < 0.0);
  int correct = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const double s = model.score(features[i]);
    const bool fraud = labels[i] == Label::fraud;
    if ((s >= 0.5) == fraud) ++correct;
  }
  CHECK(correct == static_cast<int>(features.size()));

  // Determinism: the fit has no random state at all.
  const auto again = hwfeat::fit_logistic(features, labels, config);
  CHECK(again.weights == model.weights);
  CHECK(again.bias == model.bias);

  std::vector<Label> one_class(labels.size(), Label::fraud);
  CHECK_THROWS_AS(hwfeat::fit_logistic(features, one_class, config),
                  std::invalid_argument);
  std::vector<Label> short_labels(labels.begin(), labels.end() - 1);
  CHECK_THROWS_AS(hwfeat::fit_logistic(features, short_labels, config),
                  std::invalid_argument);
}

TEST_CASE("constant features survive standardization") {
  std::vector<hwfeat::FeaturePair> features{
      {0.5, 1.0}, {0.5, 1.8}, {0.5, 0.9}, {0.5, 2.0}};
  std::vector<Label> labels{Label::non_fraud, Label::fraud, Label::non_fraud,
                            Label::fraud};
  const auto model = hwfeat::fit_logistic(features, labels, {0.1, 300});
  CHECK(std::isfinite(model.weights(0)));
  CHECK(std::isfinite(model.weights(1)));
  CHECK(std::isfinite(model.bias));
  CHECK(model.weights(1) > 0.0);  // entropy carries all the signal
}

TEST_CASE("Youden threshold maximizes J over the candidate set") {
  // Scores: fraud at {0.9, 0.8, 0.6}, non-fraud at {0.4, 0.3, 0.55}.
  const std::vector<double> scores{0.9, 0.8, 0.6, 0.4, 0.3, 0.55};
  const std::vector<Label> labels{Label::fraud,     Label::fraud,
                                  Label::fraud,     Label::non_fraud,
                                  Label::non_fraud, Label::non_fraud};
  const auto result = hwfeat::youden_threshold(scores, labels);
  // The midpoint between 0.55 and 0.6 separates perfectly: J = 1.
  CHECK(result.j == doctest::Approx(1.0));
  CHECK(result.threshold == doctest::Approx(0.575));

  // Exhaustive check: no candidate from the documented set beats it.
  auto j_at = [&](double tau) {
    int tp = 0, fn = 0, fp = 0, tn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const bool predicted = scores[i] >= tau;
      if (labels[i] == Label::fraud)
        predicted ? ++tp : ++fn;
      else
        predicted ? ++fp : ++tn;
    }
    return static_cast<double>(tp) / (tp + fn) -
           static_cast<double>(fp) / (fp + tn);
  };
  std::vector<double> sorted(scores);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> candidates{0.0, 1.0};
  for (std::size_t i = 1; i < sorted.size(); ++i)
    candidates.push_back((sorted[i - 1] + sorted[i]) / 2.0);
  for (double tau : candidates) CHECK(result.j >= j_at(tau) - 1e-12);

  // Ties resolve to the smallest threshold: with all scores equal every
  // candidate gives J = 0, so tau = 0 wins.
  const std::vector<double> flat{0.5, 0.5, 0.5, 0.5};
  const std::vector<Label> flat_labels{Label::fraud, Label::non_fraud,
                                       Label::fraud, Label::non_fraud};
  const auto tied = hwfeat::youden_threshold(flat, flat_labels);
  CHECK(tied.threshold == 0.0);
  CHECK(tied.j == 0.0);

  const std::vector<double> single{0.5};
  const std::vector<Label> single_label{Label::fraud};
  CHECK_THROWS_AS(hwfeat::youden_threshold(single, single_label),
                  std::invalid_argument);
}

TEST_CASE("fit_jobs and evaluate_jobs close the loop on the fixture") {
  const auto jobs = separable_jobs(15);
  const auto model = hwfeat::fit_jobs(jobs, "00", {0.1, 800});
  CHECK(model.reference_bitstring == "00");
  CHECK(model.youden_j == doctest::Approx(1.0));

  const auto report = hwfeat::evaluate_jobs(jobs, model);
  CHECK(report.threshold == model.threshold);
  CHECK(report.accuracy == doctest::Approx(1.0));
  CHECK(report.f1 == doctest::Approx(1.0));

  CHECK_THROWS_AS(hwfeat::evaluate_jobs({}, model), std::invalid_argument);
}

TEST_CASE("job split is stratified and deterministic") {
  const auto jobs = separable_jobs(10);  // 10 per class
  const auto split = hwfeat::split_jobs(jobs, 0.7, 5);
  CHECK(split.train.size() == 14);
  CHECK(split.holdout.size() == 6);
  long long train_fraud = 0;
  for (const auto& j : split.train) train_fraud += j.label == Label::fraud;
  CHECK(train_fraud == 7);

  const auto again = hwfeat::split_jobs(jobs, 0.7, 5);
  REQUIRE(again.train.size() == split.train.size());
  for (std::size_t i = 0; i < split.train.size(); ++i)
    CHECK(again.train[i].job_id == split.train[i].job_id);

  // No job is lost or duplicated.
  std::set<std::string> ids;
  for (const auto& j : split.train) ids.insert(j.job_id);
  for (const auto& j : split.holdout) ids.insert(j.job_id);
  CHECK(ids.size() == jobs.size());

  CHECK_THROWS_AS(hwfeat::split_jobs(jobs, 0.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(hwfeat::split_jobs(jobs, 1.5, 5), std::invalid_argument);
}

TEST_CASE("model JSON carries weights, threshold, and reference") {
  const auto jobs = separable_jobs(8);
  const auto model = hwfeat::fit_jobs(jobs, "00", {0.1, 200});
  const std::string json = hwfeat::model_to_json(model);
  CHECK(json.find("\"weights\"") != std::string::npos);
  CHECK(json.find("\"bias\"") != std::string::npos);
  CHECK(json.find("\"threshold\"") != std::string::npos);
  CHECK(json.find("\"reference_bitstring\"") != std::string::npos);
  CHECK(json.find("\"00\"") != std::string::npos);
  CHECK(json.find("\"youden_j\"") != std::string::npos);
}
