// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fidqae/common.hpp"

namespace fidqae::classify {

/// One evaluated sample: its trash fidelity and ground-truth label.
struct FidelityRecord {
  std::string sample_id;
  double fidelity = 0.0;  // in [0, 1]
  Label label = Label::non_fraud;
};

/// Decision rule: non-fraud iff F >= tau (the boundary is non-fraud).
Label classify_record(double fidelity, double threshold);

/// Confusion counts and derived metrics at one threshold. Fraud is the
/// positive class. Degenerate denominators follow two policies:
///  - a class absent from the records makes its rate (recall or
///    specificity) NaN, with `degenerate` set;
///  - prediction-side zero denominators (precision with no predicted fraud,
///    F1 with P + R = 0, MCC with any zero factor) evaluate to 0, with
///    `degenerate` set.
struct MetricsReport {
  double threshold = 0.0;
  long long tp = 0, tn = 0, fp = 0, fn = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double specificity = 0.0;
  double f1 = 0.0;
  double g_mean = 0.0;
  double mcc = 0.0;
  bool degenerate = false;
};

MetricsReport metrics_from_confusion(long long tp, long long tn, long long fp,
                                     long long fn, double threshold);

/// Applies the decision rule to every record and derives metrics.
/// Empty record set is an error.
MetricsReport compute_metrics(std::span<const FidelityRecord> records,
                              double threshold);

std::vector<MetricsReport> threshold_sweep(
    std::span<const FidelityRecord> records,
    const std::vector<double>& thresholds);

/// Default grid from the experiment protocol: 0.40..0.55 step 0.05 plus 0.65.
std::vector<double> default_threshold_grid();

/// Picks the grid threshold with the highest F1 (first in grid order on
/// ties) and returns its report.
MetricsReport best_f1_report(std::span<const FidelityRecord> records,
                             const std::vector<double>& thresholds);

/// Separation statistics between the two fidelity populations.
/// Standard deviations are population (divisor N); Cohen's d pools the two
/// variances with equal weight; overlap is the summed per-bin minimum of
/// two 50-bin histograms on [0, 1] normalized to unit mass.
struct DistributionStats {
  double nonfraud_mean = 0.0, nonfraud_std = 0.0;
  double fraud_mean = 0.0, fraud_std = 0.0;
  double cohens_d = 0.0;
  double overlap = 0.0;
  long long nonfraud_count = 0, fraud_count = 0;
};

/// Requires at least 2 records of each class.
DistributionStats distribution_stats(std::span<const FidelityRecord> records);

/// Metrics at every threshold after subsampling the fraud pool to a given
/// fraction (seeded, without replacement; count = round(fraction * pool)).
struct PrevalenceRow {
  double fraction = 0.0;
  long long fraud_count = 0;
  std::vector<MetricsReport> per_threshold;
};

std::vector<PrevalenceRow> prevalence_sweep(
    std::span<const FidelityRecord> nonfraud_records,
    std::span<const FidelityRecord> fraud_pool,
    const std::vector<double>& fractions,
    const std::vector<double>& thresholds, std::uint64_t seed);

/// Serialization. CSV columns follow the metric-table order
/// (threshold, accuracy, precision, recall, specificity, f1, g_mean, mcc);
/// confusion counts are carried by the JSON form. `metadata`, when
/// non-empty, is written as a leading `# ...` comment line.
void save_metrics_csv(const std::string& path,
                      std::span<const MetricsReport> reports,
                      const std::string& metadata = "");
std::string metrics_to_json(std::span<const MetricsReport> reports);
std::string distribution_stats_to_json(const DistributionStats& stats);
void save_fidelity_records_csv(const std::string& path,
                               std::span<const FidelityRecord> records,
                               const std::string& metadata = "");
void save_prevalence_csv(const std::string& path,
                         std::span<const PrevalenceRow> rows,
                         const std::string& metadata = "");

}  // namespace fidqae::classify
