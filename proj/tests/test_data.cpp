// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "fidqae/data.hpp"

using namespace fidqae;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / "fidqae_data_test") {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

data::TransactionTable small_table() {
  // Columns: Time, V1, V2, Amount, Class. V1 tracks the label exactly, V2 is
  // anti-correlated, Time is weaker, Amount is constant (degenerate).
  data::TransactionTable table;
  table.columns = {"Time", "V1", "V2", "Amount", "Class"};
  table.values.resize(8, 5);
  table.values << 0, 0.1, 0.9, 5, 0,
                  1, 0.2, 0.8, 5, 0,
                  2, 0.1, 0.7, 5, 0,
                  3, 0.0, 1.0, 5, 0,
                  9, 1.1, 0.1, 5, 1,
                  4, 1.2, 0.2, 5, 1,
                  5, 1.0, 0.0, 5, 1,
                  6, 1.3, 0.1, 5, 1;
  table.label_col = 4;
  return table;
}

}  // namespace

TEST_CASE("CSV loading keeps valid rows and counts the rest") {
  TempDir dir;
  const std::string path = dir.file("rows.csv");
  write_text(path,
             "Time,V1,Class\n"
             "0,1.5,0\n"
             "bad,1.5,0\n"        // non-numeric cell
             "1,2.5\n"            // short row
             "2,3.5,2\n"          // label outside {0,1}
             "3,nan,0\n"          // non-finite value
             "# a comment row\n"
             "4,4.5,1\n");
  const auto table = data::load_csv(path);
  CHECK(table.columns == std::vector<std::string>{"Time", "V1", "Class"});
  CHECK(table.rows() == 2);
  CHECK(table.dropped_rows == 4);
  CHECK(table.label_col == 2);
  CHECK(table.fraud_count() == 1);
  CHECK(table.values(0, 1) == 1.5);
  CHECK(table.values(1, 0) == 4.0);

  CHECK_THROWS_AS(data::load_csv(dir.file("missing.csv")),
                  std::runtime_error);
  write_text(dir.file("nolabel.csv"), "Time,V1\n0,1\n");
  CHECK_THROWS_AS(data::load_csv(dir.file("nolabel.csv")),
                  std::runtime_error);
  write_text(dir.file("empty.csv"), "");
  CHECK_THROWS_AS(data::load_csv(dir.file("empty.csv")), std::runtime_error);
  write_text(dir.file("headeronly.csv"), "Time,Class\n");
  CHECK_THROWS_AS(data::load_csv(dir.file("headeronly.csv")),
                  std::runtime_error);
}

TEST_CASE("CSV round trip preserves values and the metadata comment") {
  TempDir dir;
  const auto table = small_table();
  const std::string path = dir.file("round.csv");
  data::save_csv(path, table, "config_hash=beef seed=3");

  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# config_hash=beef seed=3");
  std::getline(in, line);
  CHECK(line == "Time,V1,V2,Amount,Class");

  const auto loaded = data::load_csv(path);
  CHECK(loaded.columns == table.columns);
  REQUIRE(loaded.rows() == table.rows());
  CHECK((loaded.values - table.values).norm() == 0.0);
  CHECK(loaded.label_col == table.label_col);
}

TEST_CASE("quantile interpolates between order statistics") {
  Eigen::VectorXd x(5);
  x << 7, 1, 5, 3, 9;  // sorted: 1 3 5 7 9
  CHECK(data::quantile(x, 0.0) == 1.0);
  CHECK(data::quantile(x, 1.0) == 9.0);
  CHECK(data::quantile(x, 0.5) == 5.0);
  CHECK(data::quantile(x, 0.25) == 3.0);
  CHECK(data::quantile(x, 0.125) == 2.0);  // halfway between 1 and 3
  Eigen::VectorXd even(4);
  even << 1, 2, 3, 10;
  CHECK(data::quantile(even, 0.5) == 2.5);
  CHECK_THROWS_AS(data::quantile(Eigen::VectorXd(), 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(data::quantile(x, 1.5), std::invalid_argument);
}

TEST_CASE("robust scaling centers on the median and divides by the IQR") {
  Eigen::VectorXd x(5);
  x << 1, 3, 5, 7, 9;  // median 5, IQR 7 - 3 = 4
  const auto scaled = data::robust_scale(x);
  CHECK(!scaled.zero_iqr);
  CHECK(scaled.values(0) == doctest::Approx(-1.0));
  CHECK(scaled.values(2) == doctest::Approx(0.0));
  CHECK(scaled.values(4) == doctest::Approx(1.0));

  Eigen::VectorXd flat = Eigen::VectorXd::Constant(4, 2.5);
  const auto degenerate = data::robust_scale(flat);
  CHECK(degenerate.zero_iqr);
  CHECK(degenerate.values.cwiseAbs().maxCoeff() == 0.0);

  Eigen::VectorXd bad(2);
  bad << 1.0, std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(data::robust_scale(bad), std::invalid_argument);
}

TEST_CASE("Pearson correlation on a hand example and degenerate inputs") {
  Eigen::VectorXd x(4), y(4);
  x << 1, 2, 3, 4;
  y << 2, 4, 6, 8;
  CHECK(data::pearson_correlation(x, y).r == doctest::Approx(1.0));
  y << 8, 6, 4, 2;
  CHECK(data::pearson_correlation(x, y).r == doctest::Approx(-1.0));
  y << 1, 3, 2, 5;
  // Hand value: cov = 1.375, sx = sqrt(1.25), sy = sqrt(2.1875).
  CHECK(data::pearson_correlation(x, y).r ==
        doctest::Approx(1.375 / std::sqrt(1.25 * 2.1875)).epsilon(1e-12));
  CHECK(!data::pearson_correlation(x, y).degenerate);

  Eigen::VectorXd flat = Eigen::VectorXd::Constant(4, 3.0);
  const auto degenerate = data::pearson_correlation(flat, y);
  CHECK(degenerate.degenerate);
  CHECK(degenerate.r == 0.0);
}

TEST_CASE("feature ranking orders by |r| and keeps ties stable") {
  const auto table = small_table();
  const auto report = data::rank_features(table, 2);
  CHECK(report.k == 2);
  REQUIRE(report.all_features.size() == 4);
  // V1 and V2 are the strongest (|r| near 1); constant Amount ranks last.
  CHECK(report.all_features[0].name == "V1");
  CHECK(report.all_features[1].name == "V2");
  CHECK(report.all_features[3].name == "Amount");
  CHECK(report.all_features[3].degenerate);
  CHECK(report.all_features[3].r == 0.0);
  CHECK(report.selected == std::vector<std::string>{"V1", "V2"});
  CHECK(std::abs(report.all_features[0].r) >=
        std::abs(report.all_features[1].r));

  CHECK_THROWS_AS(data::rank_features(table, 3), std::invalid_argument);
  CHECK_THROWS_AS(data::rank_features(table, 0), std::invalid_argument);
  CHECK_THROWS_AS(data::rank_features(table, 8), std::invalid_argument);

  // Two exactly tied columns keep their original table order.
  data::TransactionTable tied;
  tied.columns = {"A", "B", "Class"};
  tied.values.resize(4, 3);
  tied.values << 0, 0, 0,
                 1, 1, 0,
                 2, 2, 1,
                 3, 3, 1;
  tied.label_col = 2;
  const auto tied_report = data::rank_features(tied, 2);
  CHECK(tied_report.selected == std::vector<std::string>{"A", "B"});
}

TEST_CASE("select_features projects to ranked columns plus the label") {
  const auto table = small_table();
  const auto report = data::rank_features(table, 2);
  const auto reduced = data::select_features(table, report);
  CHECK(reduced.columns == std::vector<std::string>{"V1", "V2", "Class"});
  CHECK(reduced.label_col == 2);
  CHECK(reduced.rows() == table.rows());
  CHECK(reduced.values.col(0) == table.values.col(1));
  CHECK(reduced.values.col(1) == table.values.col(2));
  CHECK(reduced.values.col(2) == table.values.col(4));

  const std::string json = data::selection_report_to_json(report);
  CHECK(json.find("\"k\"") != std::string::npos);
  CHECK(json.find("\"V1\"") != std::string::npos);
}

TEST_CASE("column scaling targets Time and Amount unless told otherwise") {
  auto table = small_table();
  const Eigen::VectorXd v1_before = table.values.col(1);
  const auto zero_iqr = data::scale_columns(table, false);
  CHECK(zero_iqr == std::vector<std::string>{"Amount"});
  CHECK(table.values.col(1) == v1_before);             // V columns untouched
  CHECK(table.values.col(4) == small_table().values.col(4));  // label intact
  CHECK(table.values.col(3).cwiseAbs().maxCoeff() == 0.0);    // constant Amount
  // Time: median 3.5, IQR = q75 - q25 = 5.25 - 1.75.
  CHECK(table.values(0, 0) == doctest::Approx(-3.5 / 3.5));

  auto all = small_table();
  data::scale_columns(all, true);
  CHECK(all.values.col(1) != v1_before);
  CHECK(all.values.col(4) == small_table().values.col(4));
}

TEST_CASE("splits are disjoint, fraud-free in train, and deterministic") {
  data::TransactionTable table;
  table.columns = {"V1", "Class"};
  table.values.resize(50, 2);
  for (Eigen::Index r = 0; r < 50; ++r) {
    table.values(r, 0) = static_cast<double>(r);
    table.values(r, 1) = r >= 40 ? 1.0 : 0.0;  // ten fraud rows at the end
  }
  table.label_col = 1;

  data::SplitSpec spec;
  spec.train_nonfraud = 25;
  spec.test_nonfraud = 10;
  spec.test_fraud_fraction = 0.5;
  spec.seed = 99;

  const auto splits = data::make_splits(table, spec);
  CHECK(splits.train_nonfraud.size() == 25);
  CHECK(splits.test_nonfraud.size() == 10);
  CHECK(splits.test_fraud.size() == 5);  // lround(0.5 * 10)

  std::set<Eigen::Index> seen;
  for (const auto* group :
       {&splits.train_nonfraud, &splits.test_nonfraud, &splits.test_fraud})
    for (Eigen::Index r : *group) {
      CHECK(!seen.count(r));
      seen.insert(r);
      CHECK(r >= 0);
      CHECK(r < 50);
    }
  for (Eigen::Index r : splits.train_nonfraud)
    CHECK(table.values(r, 1) == 0.0);
  for (Eigen::Index r : splits.test_fraud)
    CHECK(table.values(r, 1) == 1.0);

  const auto again = data::make_splits(table, spec);
  CHECK(again.train_nonfraud == splits.train_nonfraud);
  CHECK(again.test_fraud == splits.test_fraud);
  spec.seed = 100;
  const auto other = data::make_splits(table, spec);
  CHECK(other.train_nonfraud != splits.train_nonfraud);

  spec.seed = 99;
  spec.train_nonfraud = 35;  // 35 + 10 > 40 non-fraud rows
  CHECK_THROWS_AS(data::make_splits(table, spec), std::invalid_argument);
  spec.train_nonfraud = 25;
  spec.test_fraud_fraction = 0.0;
  CHECK_THROWS_AS(data::make_splits(table, spec), std::invalid_argument);
  spec.test_fraud_fraction = 0.01;  // rounds to zero fraud rows
  CHECK_THROWS_AS(data::make_splits(table, spec), std::invalid_argument);
}

TEST_CASE("gather_rows extracts features, labels, and row ids") {
  const auto table = small_table();
  const auto rows = data::gather_rows(table, {0, 4, 7});
  REQUIRE(rows.features.rows() == 3);
  CHECK(rows.features.cols() == 4);  // all non-label columns
  CHECK(rows.features(0, 1) == table.values(0, 1));
  CHECK(rows.features(1, 1) == table.values(4, 1));
  CHECK(rows.labels ==
        std::vector<Label>{Label::non_fraud, Label::fraud, Label::fraud});
  CHECK(rows.ids == std::vector<std::string>{"r0", "r4", "r7"});
  CHECK_THROWS_AS(data::gather_rows(table, {99}), std::invalid_argument);
}
