#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include "doctest.h"
#include "tspt/csv.hpp"
#include "tspt/report.hpp"
#include "tspt/testing.hpp"

TEST_SUITE_BEGIN("csv_report");

namespace {

bool code_of(const std::function<void()>& fn, tspt::ErrorCode code) {
  try {
    fn();
  } catch (const tspt::Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace

TEST_CASE("three-column file loads as a two-covariate dataset") {
  const std::string text =
      "y,x1,x2\n"
      "1.0,2.0,3.0\n"
      "2.0,3.5,1.0\n"
      "0.5,-1.0,0.0\n"
      "1.5,0.25,2.5\n"
      "3.0,1.0,-2.0\n"
      "2.5,0.5,4.0\n";
  const auto table = tspt::parse_csv(text);
  CHECK(table.header == std::vector<std::string>{"y", "x1", "x2"});
  const auto data = tspt::dataset_from_csv(table, "y");
  CHECK(data.n() == 6);
  CHECK(data.p() == 2);
  CHECK(data.y()[0] == 1.0);
  CHECK(data.x()(1, 1) == 1.0);

  const auto series = tspt::series_from_csv(table, "x1");
  CHECK(series.n() == 6);
  CHECK(series.values()[2] == -1.0);
}

TEST_CASE("header-only file has too few rows") {
  const auto table = tspt::parse_csv("y,x1\n");
  CHECK(code_of([&] { (void)tspt::dataset_from_csv(table, "y"); }, tspt::ErrorCode::TooFewRows));
  CHECK(code_of([&] { (void)tspt::series_from_csv(table, "y"); }, tspt::ErrorCode::TooFewRows));
}

TEST_CASE("parse errors carry line and column") {
  const std::string text =
      "y,x\n"
      "1,2\n"
      "3,4\n"
      "5,abc\n";
  try {
    (void)tspt::parse_csv(text);
    FAIL("expected PARSE_ERROR");
  } catch (const tspt::Error& e) {
    CHECK(e.code() == tspt::ErrorCode::ParseError);
    const std::string what = e.what();
    CHECK(what.find("line 4") != std::string::npos);
    CHECK(what.find("column 2") != std::string::npos);
  }
  CHECK(code_of([] { (void)tspt::parse_csv("y,x\n1\n"); }, tspt::ErrorCode::ParseError));
  CHECK(code_of([] { (void)tspt::parse_csv("y\nnan\n"); }, tspt::ErrorCode::NonFiniteValue));
  CHECK(code_of([] { (void)tspt::parse_csv(""); }, tspt::ErrorCode::ParseError));
}

TEST_CASE("missing columns and files") {
  const auto table = tspt::parse_csv("y,x\n1,2\n2,3\n3,4\n4,5\n5,6\n");
  CHECK(code_of([&] { (void)tspt::dataset_from_csv(table, "z"); },
                tspt::ErrorCode::MissingColumn));
  CHECK(code_of([] { (void)tspt::read_csv("/nonexistent/path.csv"); },
                tspt::ErrorCode::FileNotFound));
}

TEST_CASE("write and read round trip") {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string path = (dir / "tspt_csv_roundtrip.csv").string();
  Eigen::MatrixXd cells(3, 2);
  cells << 1.5, -2.25, 0.125, 3.0, 1e-9, 42.0;
  tspt::write_csv(path, {"a", "b"}, cells);
  const auto table = tspt::read_csv(path);
  CHECK(table.header == std::vector<std::string>{"a", "b"});
  CHECK((table.cells - cells).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("reports round trip and are stable without timing") {
  tspt::TestOutcome outcome;
  outcome.method = tspt::Method::PermTrendStud;
  outcome.statistic = 1.25;
  outcome.p_value = 0.031;
  outcome.reject = true;
  outcome.alpha = 0.05;
  outcome.n = 100;
  outcome.p = 1;
  outcome.bandwidth_used = 5;
  outcome.floored = false;

  const std::vector<std::string> argv{"tspt", "test", "trend", "--data", "f.csv"};
  const std::string a = tspt::render_test_report(argv, outcome, 0.5);
  const std::string b = tspt::render_test_report(argv, outcome, 9.75);

  CHECK(tspt::reserialize_report(a) == a);
  CHECK(a != b);
  CHECK(tspt::strip_timing(a) == tspt::strip_timing(b));
  CHECK(tspt::render_test_report(argv, outcome, 0.5) == a);

  outcome.perm_samples = std::vector<double>{0.5, 1.0, 1.25};
  const std::string with_samples = tspt::render_test_report(argv, outcome, 0.0);
  CHECK(with_samples.find("perm_samples") != std::string::npos);
}

TEST_SUITE_END();
