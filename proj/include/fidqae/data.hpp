// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fidqae/common.hpp"

namespace fidqae::data {

/// Numeric transaction table. One row per transaction; the label column
/// ("Class", 0 = non-fraud, 1 = fraud) is kept inside the matrix at
/// `label_col`. Malformed input rows are dropped and counted, not fatal.
struct TransactionTable {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;
  Eigen::Index label_col = -1;
  std::size_t dropped_rows = 0;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  Eigen::Index column_index(const std::string& name) const;
  long long fraud_count() const;
};

/// Loads a headered CSV of numeric columns. Requires a "Class" column whose
/// surviving values are exactly 0 or 1. Rows with the wrong field count,
/// non-numeric cells, non-finite values, or a non-0/1 label are dropped and
/// counted in `dropped_rows`. Missing file or empty table is an error.
TransactionTable load_csv(const std::string& path);

void save_csv(const std::string& path, const TransactionTable& table,
              const std::string& metadata = "");

/// (x - median) / IQR with linearly interpolated quartiles. IQR == 0
/// degrades to x - median and sets the flag.
struct ScaledColumn {
  Eigen::VectorXd values;
  bool zero_iqr = false;
};
ScaledColumn robust_scale(const Eigen::VectorXd& x);

/// Linear-interpolation quantile of the sorted sample (the same convention
/// robust_scale uses); q in [0, 1].
double quantile(const Eigen::VectorXd& x, double q);

/// Pearson correlation; a constant input on either side is degenerate and
/// reports r = 0 with the flag set (so it ranks last in selection).
struct Correlation {
  double r = 0.0;
  bool degenerate = false;
};
Correlation pearson_correlation(const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y);

/// Feature selection by |correlation with the label| computed on the FULL
/// labeled table (before any split; see the README's leakage caveat).
/// k must be a power of two so the reduced table amplitude-encodes exactly.
struct RankedFeature {
  std::string name;
  double r = 0.0;
  bool degenerate = false;
};
struct SelectionReport {
  std::vector<RankedFeature> all_features;   // |r| descending
  std::vector<std::string> selected;         // first k of the ranking
  int k = 0;
};

SelectionReport rank_features(const TransactionTable& table, int k);

/// Reduced table: the k selected feature columns in ranked order, then the
/// label column.
TransactionTable select_features(const TransactionTable& table,
                                 const SelectionReport& report);

std::string selection_report_to_json(const SelectionReport& report);

/// Applies robust scaling in place to the named columns (by default, where
/// present, only "Time" and "Amount"; scale_all scales every non-label
/// column). Returns the names of columns that had zero IQR.
std::vector<std::string> scale_columns(TransactionTable& table, bool scale_all);

/// Row-index partition. Train is fraud-free by construction; all three
/// index sets are pairwise disjoint.
struct SplitSpec {
  Eigen::Index train_nonfraud = 2000;
  Eigen::Index test_nonfraud = 1000;
  double test_fraud_fraction = 1.0;
  std::uint64_t seed = 42;
};
struct Splits {
  std::vector<Eigen::Index> train_nonfraud;
  std::vector<Eigen::Index> test_nonfraud;
  std::vector<Eigen::Index> test_fraud;
};

Splits make_splits(const TransactionTable& table, const SplitSpec& spec);

/// Feature matrix (all non-label columns, table order) for a row subset,
/// with per-row labels and stable "r<row>" identifiers.
struct FeatureRows {
  Eigen::MatrixXd features;
  std::vector<Label> labels;
  std::vector<std::string> ids;
};
FeatureRows gather_rows(const TransactionTable& table,
                        const std::vector<Eigen::Index>& rows);

}  // namespace fidqae::data
