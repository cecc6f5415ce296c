// SPDX-License-Identifier: Apache-2.0
#include "fidqae/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace fidqae::classify {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_threshold(double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw std::invalid_argument("threshold must lie in [0, 1]");
}

}  // namespace

Label classify_record(double fidelity, double threshold) {
  check_threshold(threshold);
  return fidelity >= threshold ? Label::non_fraud : Label::fraud;
}

MetricsReport metrics_from_confusion(long long tp, long long tn, long long fp,
                                     long long fn, double threshold) {
  if (tp < 0 || tn < 0 || fp < 0 || fn < 0)
    throw std::invalid_argument("confusion counts must be non-negative");
  const long long total = tp + tn + fp + fn;
  if (total == 0)
    throw std::invalid_argument("metrics require at least one record");

  MetricsReport r;
  r.threshold = threshold;
  r.tp = tp;
  r.tn = tn;
  r.fp = fp;
  r.fn = fn;
  r.accuracy = static_cast<double>(tp + tn) / static_cast<double>(total);

  if (tp + fn == 0) {  // no fraud records at all
    r.recall = kNaN;
    r.degenerate = true;
  } else {
    r.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  if (tn + fp == 0) {  // no non-fraud records at all
    r.specificity = kNaN;
    r.degenerate = true;
  } else {
    r.specificity = static_cast<double>(tn) / static_cast<double>(tn + fp);
  }
  if (tp + fp == 0) {  // nothing predicted fraud
    r.precision = 0.0;
    r.degenerate = true;
  } else {
    r.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }

  if (std::isnan(r.recall)) {
    r.f1 = kNaN;
    r.g_mean = kNaN;
  } else if (r.precision + r.recall == 0.0) {
    r.f1 = 0.0;
    r.degenerate = true;
    r.g_mean = std::isnan(r.specificity)
                   ? kNaN
                   : std::sqrt(r.recall * r.specificity);
  } else {
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    r.g_mean = std::isnan(r.specificity)
                   ? kNaN
                   : std::sqrt(r.recall * r.specificity);
  }

  const double mcc_factors[] = {
      static_cast<double>(tp + fp), static_cast<double>(tp + fn),
      static_cast<double>(tn + fp), static_cast<double>(tn + fn)};
  double denom = 1.0;
  bool zero_factor = false;
  for (double f : mcc_factors) {
    if (f == 0.0) zero_factor = true;
    denom *= f;
  }
  if (zero_factor) {
    r.mcc = 0.0;
    r.degenerate = true;
  } else {
    r.mcc = (static_cast<double>(tp) * static_cast<double>(tn) -
             static_cast<double>(fp) * static_cast<double>(fn)) /
            std::sqrt(denom);
  }
  return r;
}

MetricsReport compute_metrics(std::span<const FidelityRecord> records,
                              double threshold) {
  check_threshold(threshold);
  if (records.empty())
    throw std::invalid_argument("compute_metrics: empty record set");
  long long tp = 0, tn = 0, fp = 0, fn = 0;
  for (const FidelityRecord& rec : records) {
    const Label predicted = classify_record(rec.fidelity, threshold);
    if (rec.label == Label::fraud) {
      predicted == Label::fraud ? ++tp : ++fn;
    } else {
      predicted == Label::fraud ? ++fp : ++tn;
    }
  }
  return metrics_from_confusion(tp, tn, fp, fn, threshold);
}

std::vector<MetricsReport> threshold_sweep(
    std::span<const FidelityRecord> records,
    const std::vector<double>& thresholds) {
  if (thresholds.empty())
    throw std::invalid_argument("threshold_sweep: empty threshold grid");
  std::vector<MetricsReport> reports;
  reports.reserve(thresholds.size());
  for (double t : thresholds) reports.push_back(compute_metrics(records, t));
  return reports;
}

std::vector<double> default_threshold_grid() {
  return {0.40, 0.45, 0.50, 0.55, 0.65};
}

MetricsReport best_f1_report(std::span<const FidelityRecord> records,
                             const std::vector<double>& thresholds) {
  const auto reports = threshold_sweep(records, thresholds);
  std::size_t best = 0;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const double a = std::isnan(reports[i].f1) ? -1.0 : reports[i].f1;
    const double b = std::isnan(reports[best].f1) ? -1.0 : reports[best].f1;
    if (a > b) best = i;
  }
  return reports[best];
}

DistributionStats distribution_stats(std::span<const FidelityRecord> records) {
  std::vector<double> nonfraud, fraud;
  for (const FidelityRecord& rec : records)
    (rec.label == Label::fraud ? fraud : nonfraud).push_back(rec.fidelity);
  if (nonfraud.size() < 2 || fraud.size() < 2)
    throw std::invalid_argument(
        "distribution_stats: need at least 2 records of each class");

  auto mean_of = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) /
           static_cast<double>(v.size());
  };
  auto pop_std = [](const std::vector<double>& v, double mu) {
    double acc = 0.0;
    for (double x : v) acc += (x - mu) * (x - mu);
    return std::sqrt(acc / static_cast<double>(v.size()));
  };

  DistributionStats s;
  s.nonfraud_count = static_cast<long long>(nonfraud.size());
  s.fraud_count = static_cast<long long>(fraud.size());
  s.nonfraud_mean = mean_of(nonfraud);
  s.fraud_mean = mean_of(fraud);
  s.nonfraud_std = pop_std(nonfraud, s.nonfraud_mean);
  s.fraud_std = pop_std(fraud, s.fraud_mean);

  const double pooled = std::sqrt(
      (s.nonfraud_std * s.nonfraud_std + s.fraud_std * s.fraud_std) / 2.0);
  s.cohens_d = pooled == 0.0
                   ? (s.nonfraud_mean == s.fraud_mean
                          ? 0.0
                          : std::numeric_limits<double>::infinity())
                   : std::abs(s.nonfraud_mean - s.fraud_mean) / pooled;

  // Overlap coefficient of the two empirical densities: 50 equal-width
  // bins on [0, 1], fidelity 1.0 assigned to the last bin.
  constexpr int kBins = 50;
  auto histogram = [](const std::vector<double>& v) {
    std::vector<double> h(kBins, 0.0);
    for (double x : v) {
      if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument(
            "distribution_stats: fidelity outside [0, 1]");
      int bin = std::min(static_cast<int>(x * kBins), kBins - 1);
      h[static_cast<std::size_t>(bin)] += 1.0;
    }
    for (double& c : h) c /= static_cast<double>(v.size());
    return h;
  };
  const auto ha = histogram(nonfraud);
  const auto hb = histogram(fraud);
  s.overlap = 0.0;
  for (int b = 0; b < kBins; ++b)
    s.overlap += std::min(ha[static_cast<std::size_t>(b)],
                          hb[static_cast<std::size_t>(b)]);
  return s;
}

std::vector<PrevalenceRow> prevalence_sweep(
    std::span<const FidelityRecord> nonfraud_records,
    std::span<const FidelityRecord> fraud_pool,
    const std::vector<double>& fractions,
    const std::vector<double>& thresholds, std::uint64_t seed) {
  if (fractions.empty())
    throw std::invalid_argument("prevalence_sweep: empty fraction list");
  std::vector<PrevalenceRow> rows;
  rows.reserve(fractions.size());
  for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
    const double fraction = fractions[fi];
    if (!(fraction > 0.0 && fraction <= 1.0))
      throw std::invalid_argument("prevalence fraction must lie in (0, 1]");
    const auto want = static_cast<std::size_t>(
        std::lround(fraction * static_cast<double>(fraud_pool.size())));
    if (want == 0 || want > fraud_pool.size())
      throw std::invalid_argument(
          "prevalence_sweep: fraud pool too small for fraction " +
          std::to_string(fraction));

    std::vector<std::size_t> order(fraud_pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    SeededRng rng(derive_seed(seed, fi));
    rng.shuffle(order);

    std::vector<FidelityRecord> records(nonfraud_records.begin(),
                                        nonfraud_records.end());
    for (std::size_t k = 0; k < want; ++k)
      records.push_back(fraud_pool[order[k]]);

    PrevalenceRow row;
    row.fraction = fraction;
    row.fraud_count = static_cast<long long>(want);
    row.per_threshold = threshold_sweep(records, thresholds);
    rows.push_back(std::move(row));
  }
  return rows;
}

void save_metrics_csv(const std::string& path,
                      std::span<const MetricsReport> reports,
                      const std::string& metadata) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write metrics file: " + path);
  if (!metadata.empty()) out << "# " << metadata << "\n";
  out << "threshold,accuracy,precision,recall,specificity,f1,g_mean,mcc\n";
  for (const MetricsReport& r : reports) {
    out << fmt(r.threshold) << ',' << fmt(r.accuracy) << ',' << fmt(r.precision)
        << ',' << fmt(r.recall) << ',' << fmt(r.specificity) << ',' << fmt(r.f1)
        << ',' << fmt(r.g_mean) << ',' << fmt(r.mcc) << "\n";
  }
}

namespace {

json report_to_json(const MetricsReport& r) {
  auto num = [](double v) {
    return std::isnan(v) ? json() : json(v);  // NaN serializes as null
  };
  return json{{"threshold", r.threshold},
              {"tp", r.tp},
              {"tn", r.tn},
              {"fp", r.fp},
              {"fn", r.fn},
              {"accuracy", num(r.accuracy)},
              {"precision", num(r.precision)},
              {"recall", num(r.recall)},
              {"specificity", num(r.specificity)},
              {"f1", num(r.f1)},
              {"g_mean", num(r.g_mean)},
              {"mcc", num(r.mcc)},
              {"degenerate", r.degenerate}};
}

}  // namespace

std::string metrics_to_json(std::span<const MetricsReport> reports) {
  json arr = json::array();
  for (const MetricsReport& r : reports) arr.push_back(report_to_json(r));
  return arr.dump(2);
}

std::string distribution_stats_to_json(const DistributionStats& s) {
  json j{{"nonfraud", {{"mean", s.nonfraud_mean}, {"std", s.nonfraud_std},
                       {"count", s.nonfraud_count}}},
         {"fraud", {{"mean", s.fraud_mean}, {"std", s.fraud_std},
                    {"count", s.fraud_count}}},
         {"cohens_d", s.cohens_d},
         {"overlap", s.overlap}};
  return j.dump(2);
}

void save_fidelity_records_csv(const std::string& path,
                               std::span<const FidelityRecord> records,
                               const std::string& metadata) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write fidelity file: " + path);
  if (!metadata.empty()) out << "# " << metadata << "\n";
  out << "sample_id,fidelity,label\n";
  for (const FidelityRecord& r : records)
    out << r.sample_id << ',' << fmt(r.fidelity) << ','
        << label_to_int(r.label) << "\n";
}

void save_prevalence_csv(const std::string& path,
                         std::span<const PrevalenceRow> rows,
                         const std::string& metadata) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write prevalence file: " + path);
  if (!metadata.empty()) out << "# " << metadata << "\n";
  out << "fraction,fraud_count,threshold,precision,recall,f1,mcc\n";
  for (const PrevalenceRow& row : rows)
    for (const MetricsReport& r : row.per_threshold)
      out << fmt(row.fraction) << ',' << row.fraud_count << ','
          << fmt(r.threshold) << ',' << fmt(r.precision) << ','
          << fmt(r.recall) << ',' << fmt(r.f1) << ',' << fmt(r.mcc) << "\n";
}

}  // namespace fidqae::classify
