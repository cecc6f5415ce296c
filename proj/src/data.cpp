// SPDX-License-Identifier: Apache-2.0
#include "fidqae/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace fidqae::data {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\"");
  std::size_t b = s.find_last_not_of(" \t\r\"");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& cell, double& out) {
  const std::string t = strip(cell);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = begin + t.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

}  // namespace

Eigen::Index TransactionTable::column_index(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == name) return static_cast<Eigen::Index>(c);
  throw std::invalid_argument("no column named '" + name + "'");
}

long long TransactionTable::fraud_count() const {
  long long n = 0;
  for (Eigen::Index r = 0; r < rows(); ++r)
    if (values(r, label_col) == 1.0) ++n;
  return n;
}

TransactionTable load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);

  std::string line;
  // Skip leading comment lines so cached outputs re-load cleanly.
  do {
    if (!std::getline(in, line))
      throw std::runtime_error("dataset file is empty: " + path);
  } while (!line.empty() && line[0] == '#');

  TransactionTable table;
  for (std::string& name : split_line(line)) table.columns.push_back(strip(name));
  if (table.columns.size() < 2)
    throw std::runtime_error("dataset header needs at least two columns");

  Eigen::Index label_col = -1;
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    if (table.columns[c] == "Class") label_col = static_cast<Eigen::Index>(c);
  if (label_col < 0)
    throw std::runtime_error("dataset has no 'Class' label column");
  table.label_col = label_col;

  const std::size_t width = table.columns.size();
  std::vector<double> flat;
  std::size_t good_rows = 0;
  std::vector<double> row(width);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_line(line);
    bool ok = fields.size() == width;
    for (std::size_t c = 0; ok && c < width; ++c)
      ok = parse_double(fields[c], row[c]);
    if (ok) {
      const double label = row[static_cast<std::size_t>(label_col)];
      ok = label == 0.0 || label == 1.0;
    }
    if (!ok) {
      ++table.dropped_rows;
      continue;
    }
    flat.insert(flat.end(), row.begin(), row.end());
    ++good_rows;
  }
  if (good_rows == 0)
    throw std::runtime_error("dataset has no valid data rows: " + path);

  table.values = Eigen::Map<const Eigen::Matrix<
      double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), static_cast<Eigen::Index>(good_rows),
      static_cast<Eigen::Index>(width));
  return table;
}

void save_csv(const std::string& path, const TransactionTable& table,
              const std::string& metadata) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  if (!metadata.empty()) out << "# " << metadata << "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << (c ? "," : "") << table.columns[c];
  out << "\n";
  char buf[64];
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", table.values(r, c));
      out << (c ? "," : "") << buf;
    }
    out << "\n";
  }
}

double quantile(const Eigen::VectorXd& x, double q) {
  if (x.size() == 0) throw std::invalid_argument("quantile: empty vector");
  if (!(q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("quantile: q must lie in [0, 1]");
  std::vector<double> sorted(x.data(), x.data() + x.size());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - std::floor(pos);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ScaledColumn robust_scale(const Eigen::VectorXd& x) {
  if (x.size() == 0) throw std::invalid_argument("robust_scale: empty column");
  if (!x.allFinite())
    throw std::invalid_argument("robust_scale: non-finite value");
  const double median = quantile(x, 0.5);
  const double iqr = quantile(x, 0.75) - quantile(x, 0.25);
  ScaledColumn out;
  if (iqr == 0.0) {
    out.values = x.array() - median;
    out.zero_iqr = true;
  } else {
    out.values = (x.array() - median) / iqr;
  }
  return out;
}

Correlation pearson_correlation(const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument(
        "pearson_correlation: need two equal-length vectors of size >= 2");
  const double mx = x.mean();
  const double my = y.mean();
  const Eigen::ArrayXd dx = x.array() - mx;
  const Eigen::ArrayXd dy = y.array() - my;
  const double sxx = (dx * dx).sum();
  const double syy = (dy * dy).sum();
  if (sxx == 0.0 || syy == 0.0) return Correlation{0.0, true};
  return Correlation{(dx * dy).sum() / std::sqrt(sxx * syy), false};
}

SelectionReport rank_features(const TransactionTable& table, int k) {
  if (k < 1) throw std::invalid_argument("select_features: k must be >= 1");
  if ((k & (k - 1)) != 0)
    throw std::invalid_argument(
        "select_features: k must be a power of two (amplitude encoding "
        "requires 2^n features), got " + std::to_string(k));
  const auto feature_count = static_cast<int>(table.cols()) - 1;
  if (k > feature_count)
    throw std::invalid_argument(
        "select_features: k exceeds available feature count");

  const Eigen::VectorXd label = table.values.col(table.label_col);
  SelectionReport report;
  report.k = k;
  for (Eigen::Index c = 0; c < table.cols(); ++c) {
    if (c == table.label_col) continue;
    const Correlation corr = pearson_correlation(table.values.col(c), label);
    report.all_features.push_back(
        RankedFeature{table.columns[static_cast<std::size_t>(c)], corr.r,
                      corr.degenerate});
  }
  // Stable sort by |r| descending keeps original column order on ties.
  std::stable_sort(report.all_features.begin(), report.all_features.end(),
                   [](const RankedFeature& a, const RankedFeature& b) {
                     return std::abs(a.r) > std::abs(b.r);
                   });
  for (int i = 0; i < k; ++i)
    report.selected.push_back(
        report.all_features[static_cast<std::size_t>(i)].name);
  return report;
}

TransactionTable select_features(const TransactionTable& table,
                                 const SelectionReport& report) {
  TransactionTable reduced;
  reduced.columns = report.selected;
  reduced.columns.push_back("Class");
  reduced.label_col = static_cast<Eigen::Index>(report.selected.size());
  reduced.dropped_rows = table.dropped_rows;
  reduced.values.resize(table.rows(),
                        static_cast<Eigen::Index>(reduced.columns.size()));
  for (std::size_t c = 0; c < report.selected.size(); ++c)
    reduced.values.col(static_cast<Eigen::Index>(c)) =
        table.values.col(table.column_index(report.selected[c]));
  reduced.values.col(reduced.label_col) = table.values.col(table.label_col);
  return reduced;
}

std::string selection_report_to_json(const SelectionReport& report) {
  nlohmann::json features = nlohmann::json::array();
  for (const RankedFeature& f : report.all_features)
    features.push_back({{"name", f.name},
                        {"r", f.r},
                        {"degenerate", f.degenerate}});
  nlohmann::json j{{"k", report.k},
                   {"selected", report.selected},
                   {"correlations", features}};
  return j.dump(2);
}

std::vector<std::string> scale_columns(TransactionTable& table,
                                       bool scale_all) {
  std::vector<std::string> zero_iqr;
  for (Eigen::Index c = 0; c < table.cols(); ++c) {
    if (c == table.label_col) continue;
    const std::string& name = table.columns[static_cast<std::size_t>(c)];
    if (!scale_all && name != "Time" && name != "Amount") continue;
    ScaledColumn scaled = robust_scale(table.values.col(c));
    table.values.col(c) = scaled.values;
    if (scaled.zero_iqr) zero_iqr.push_back(name);
  }
  return zero_iqr;
}

Splits make_splits(const TransactionTable& table, const SplitSpec& spec) {
  if (spec.train_nonfraud < 1 || spec.test_nonfraud < 1)
    throw std::invalid_argument("make_splits: split sizes must be >= 1");
  if (!(spec.test_fraud_fraction > 0.0 && spec.test_fraud_fraction <= 1.0))
    throw std::invalid_argument(
        "make_splits: test_fraud_fraction must lie in (0, 1]");

  std::vector<Eigen::Index> nonfraud, fraud;
  for (Eigen::Index r = 0; r < table.rows(); ++r)
    (table.values(r, table.label_col) == 1.0 ? fraud : nonfraud).push_back(r);

  if (static_cast<Eigen::Index>(nonfraud.size()) <
      spec.train_nonfraud + spec.test_nonfraud)
    throw std::invalid_argument(
        "make_splits: not enough non-fraud rows for the requested split");
  if (fraud.empty())
    throw std::invalid_argument("make_splits: table has no fraud rows");

  SeededRng nonfraud_rng(derive_seed(spec.seed, 0));
  nonfraud_rng.shuffle(nonfraud);
  SeededRng fraud_rng(derive_seed(spec.seed, 1));
  fraud_rng.shuffle(fraud);

  const auto fraud_take = static_cast<std::size_t>(std::lround(
      spec.test_fraud_fraction * static_cast<double>(fraud.size())));
  if (fraud_take == 0)
    throw std::invalid_argument(
        "make_splits: test_fraud_fraction selects zero fraud rows");

  Splits splits;
  splits.train_nonfraud.assign(
      nonfraud.begin(), nonfraud.begin() + spec.train_nonfraud);
  splits.test_nonfraud.assign(
      nonfraud.begin() + spec.train_nonfraud,
      nonfraud.begin() + spec.train_nonfraud + spec.test_nonfraud);
  splits.test_fraud.assign(fraud.begin(),
                           fraud.begin() + static_cast<Eigen::Index>(fraud_take));
  return splits;
}

FeatureRows gather_rows(const TransactionTable& table,
                        const std::vector<Eigen::Index>& rows) {
  FeatureRows out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()),
                      table.cols() - 1);
  out.labels.reserve(rows.size());
  out.ids.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Eigen::Index r = rows[i];
    if (r < 0 || r >= table.rows())
      throw std::invalid_argument("gather_rows: row index out of range");
    Eigen::Index dst = 0;
    for (Eigen::Index c = 0; c < table.cols(); ++c) {
      if (c == table.label_col) continue;
      out.features(static_cast<Eigen::Index>(i), dst++) = table.values(r, c);
    }
    out.labels.push_back(table.values(r, table.label_col) == 1.0
                             ? Label::fraud
                             : Label::non_fraud);
    out.ids.push_back("r" + std::to_string(r));
  }
  return out;
}

}  // namespace fidqae::data
