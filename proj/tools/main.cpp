// Command line driver: single tests on CSV data, process simulation, Monte
// Carlo studies, and the simulation-table presets.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tspt/csv.hpp"
#include "tspt/dgp.hpp"
#include "tspt/montecarlo.hpp"
#include "tspt/report.hpp"
#include "tspt/testing.hpp"

namespace {

struct CommonOpts {
  std::string data_path;
  double alpha = 0.05;
  int permutations = tspt::kDefaultPermutations;
  std::string bandwidth = "auto";
  std::uint64_t seed = 0;
  std::optional<double> floor{};
  bool exhaustive = false;
  bool keep_samples = false;
  int threads = 1;
  std::string out_path;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_perm_knobs = true) {
  cmd->add_option("--data", opts.data_path, "input CSV file (header row required)")->required();
  cmd->add_option("--alpha", opts.alpha, "nominal level in (0, 1)")->capture_default_str();
  if (with_perm_knobs) {
    cmd->add_option("--permutations", opts.permutations,
                    "number of permutations, identity included")
        ->capture_default_str();
    cmd->add_option("--bandwidth", opts.bandwidth,
                    "long-run variance bandwidth, or 'auto' for floor(n^(1/3)) + 1")
        ->capture_default_str();
    cmd->add_option("--seed", opts.seed, "permutation stream seed")->capture_default_str();
    cmd->add_option("--floor", opts.floor,
                    "eigenvalue floor (default 1e-4 regression / 1e-6 trend; 0 disables)");
    cmd->add_flag("--exhaustive", opts.exhaustive, "enumerate all n! permutations (n <= 8)");
    cmd->add_flag("--keep-samples", opts.keep_samples,
                  "retain the permutation samples in the report");
    cmd->add_option("--threads", opts.threads, "worker threads")->capture_default_str();
  }
  cmd->add_option("--out", opts.out_path, "write the JSON report here instead of stdout");
}

tspt::TestConfig config_from(const CommonOpts& opts) {
  tspt::TestConfig cfg;
  cfg.alpha = opts.alpha;
  cfg.permutations = opts.permutations;
  cfg.seed = opts.seed;
  if (opts.bandwidth != "auto") {
    try {
      std::size_t parsed = 0;
      cfg.bandwidth = std::stoi(opts.bandwidth, &parsed);
      if (parsed != opts.bandwidth.size()) throw std::invalid_argument(opts.bandwidth);
    } catch (const std::exception&) {
      tspt::fail(tspt::ErrorCode::InvalidConfig,
                 "--bandwidth must be a positive integer or 'auto'");
    }
  }
  cfg.floor = opts.floor;
  cfg.mode = opts.exhaustive ? tspt::SampleMode::Exhaustive : tspt::SampleMode::Sampled;
  cfg.keep_samples = opts.keep_samples;
  cfg.threads = opts.threads;
  return cfg;
}

void emit_report(const std::string& report, const std::string& out_path,
                 const std::string& summary) {
  if (out_path.empty()) {
    std::cout << report << "\n";
    std::cerr << summary << "\n";
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) tspt::fail(tspt::ErrorCode::FileNotFound, "cannot write \"" + out_path + "\"");
    out << report << "\n";
    std::cout << summary << " -> " << out_path << "\n";
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int run(int argc, char** argv) {
  const std::vector<std::string> invocation(argv, argv + argc);

  CLI::App app{"Permutation tests for time series regression and monotone trend"};
  app.require_subcommand(1);

  // ---- test ----
  CLI::App* test = app.add_subcommand("test", "run a hypothesis test on CSV data");
  test->require_subcommand(1);

  CommonOpts reg_opts;
  std::string reg_response;
  std::string reg_region = "sphere";
  bool reg_no_studentize = false;
  CLI::App* reg = test->add_subcommand("regression", "test that all regression coefficients are zero");
  add_common(reg, reg_opts);
  reg->add_option("--response", reg_response, "response column name")->required();
  reg->add_option("--region", reg_region, "sphere|box rejection region")->capture_default_str();
  reg->add_flag("--no-studentize", reg_no_studentize, "skip the long-run variance studentization");

  CommonOpts trend_opts;
  std::string trend_column;
  std::string trend_tail = "upper";
  bool trend_no_studentize = false;
  CLI::App* trend = test->add_subcommand("trend", "test a series for absence of monotone trend");
  add_common(trend, trend_opts);
  trend->add_option("--column", trend_column, "series column name")->required();
  trend->add_option("--tail", trend_tail, "upper|two-sided")->capture_default_str();
  trend->add_flag("--no-studentize", trend_no_studentize, "use the raw trend statistic");

  CommonOpts lb_opts;
  std::string lb_column;
  int lb_lags = 0;
  CLI::App* lb = test->add_subcommand("ljung-box", "joint test that leading autocorrelations vanish");
  add_common(lb, lb_opts);
  lb->add_option("--column", lb_column, "series column name")->required();
  lb->add_option("--lags", lb_lags, "number of autocorrelation lags")->required();

  CommonOpts cc_opts;
  std::string cc_response;
  std::vector<int> cc_lags;
  CLI::App* cc = test->add_subcommand("cross-corr", "joint test that (lagged) cross-correlations vanish");
  add_common(cc, cc_opts);
  cc->add_option("--response", cc_response, "response column name")->required();
  cc->add_option("--lags", cc_lags, "lag list (default 0)")->delimiter(',');

  CommonOpts cw_opts;
  std::string cw_response;
  bool cw_as_printed = false;
  CLI::App* cw = test->add_subcommand("classical", "chi-squared Wald baseline");
  add_common(cw, cw_opts, /*with_perm_knobs=*/false);
  cw->add_option("--response", cw_response, "response column name")->required();
  cw->add_flag("--as-printed", cw_as_printed,
               "use the inverse-covariance quadratic form variant");

  // ---- simulate ----
  std::string sim_dgp;
  int sim_n = 0;
  std::uint64_t sim_seed = 0;
  int sim_m = 0;
  int sim_p = 3;
  double sim_rho = 0.0;
  std::optional<double> sim_trend_h{};
  std::vector<double> sim_trend_g;
  std::string sim_out;
  CLI::App* sim = app.add_subcommand("simulate", "generate a dataset from a named process");
  sim->add_option("--dgp", sim_dgp, "mdep-reg|var2|ar1|mdep-series|iid-gauss")->required();
  sim->add_option("--n", sim_n, "sample size")->required();
  sim->add_option("--seed", sim_seed, "generator seed")->required();
  sim->add_option("--m", sim_m, "dependence parameter for product designs");
  sim->add_option("--p", sim_p, "covariate dimension for mdep-reg")->capture_default_str();
  sim->add_option("--rho", sim_rho, "autoregressive parameter for var2/ar1");
  sim->add_option("--trend-h", sim_trend_h, "inject the local linear trend h i / n^(3/2)");
  sim->add_option("--trend-g", sim_trend_g, "inject a tabulated monotone trend")->delimiter(',');
  sim->add_option("--out", sim_out, "output CSV path")->required();

  // ---- study ----
  std::string study_spec_path;
  int study_threads = 1;
  std::string study_out;
  std::string study_csv;
  CLI::App* study = app.add_subcommand("study", "run a Monte Carlo study from a JSON spec");
  study->add_option("--spec", study_spec_path, "study spec JSON file")->required();
  study->add_option("--threads", study_threads, "worker threads")->capture_default_str();
  study->add_option("--out", study_out, "write the JSON report here instead of stdout");
  study->add_option("--csv", study_csv, "also write the per-cell CSV table here");

  // ---- reproduce ----
  int repro_table = 0;
  double repro_scale = 0.1;
  int repro_threads = 1;
  std::uint64_t repro_seed = 20240901ull;
  std::string repro_out;
  std::string repro_csv;
  CLI::App* repro = app.add_subcommand("reproduce", "run a simulation-table preset at desk scale");
  repro->add_option("--table", repro_table, "table number 1-4")->required();
  repro->add_option("--scale", repro_scale, "replication-count multiplier")->capture_default_str();
  repro->add_option("--threads", repro_threads, "worker threads")->capture_default_str();
  repro->add_option("--seed", repro_seed, "master seed")->capture_default_str();
  repro->add_option("--out", repro_out, "write the JSON report here instead of stdout");
  repro->add_option("--csv", repro_csv, "also write the per-cell CSV table here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const auto start = std::chrono::steady_clock::now();

  auto run_study_command = [&](const tspt::StudySpec& spec, int threads,
                               const std::string& out_path, const std::string& csv_path) {
    const tspt::McReport report = tspt::run_study(spec, threads, [](const tspt::McCell& cell) {
      std::fprintf(stderr, "cell %s n=%d %s: rate=%.4f (se=%.4f, %.1fs)\n", cell.dgp.c_str(),
                   cell.n, cell.method.c_str(), cell.rejection_rate, cell.mc_se,
                   cell.elapsed_seconds);
    });
    if (!csv_path.empty()) {
      std::ofstream csv(csv_path, std::ios::binary);
      if (!csv) tspt::fail(tspt::ErrorCode::FileNotFound, "cannot write \"" + csv_path + "\"");
      csv << tspt::mc_report_to_csv(report);
    }
    const std::string summary = "study: " + std::to_string(report.cells.size()) + " cells, R=" +
                                std::to_string(spec.replications);
    emit_report(tspt::render_study_report(invocation, report, seconds_since(start)), out_path,
                summary);
  };

  if (reg->parsed()) {
    tspt::TestConfig cfg = config_from(reg_opts);
    cfg.studentize = !reg_no_studentize;
    if (reg_region == "box") {
      cfg.region = tspt::Region::Box;
    } else if (reg_region != "sphere") {
      tspt::fail(tspt::ErrorCode::InvalidConfig, "--region must be sphere or box");
    }
    const tspt::Dataset data =
        tspt::dataset_from_csv(tspt::read_csv(reg_opts.data_path), reg_response);
    const tspt::TestOutcome outcome = tspt::regression_perm_test(data, cfg);
    emit_report(tspt::render_test_report(invocation, outcome, seconds_since(start)),
                reg_opts.out_path, tspt::summary_line(outcome));
  } else if (trend->parsed()) {
    tspt::TestConfig cfg = config_from(trend_opts);
    cfg.studentize = !trend_no_studentize;
    if (trend_tail == "two-sided") {
      cfg.tail = tspt::Tail::TwoSided;
    } else if (trend_tail != "upper") {
      tspt::fail(tspt::ErrorCode::InvalidConfig, "--tail must be upper or two-sided");
    }
    const tspt::Series series =
        tspt::series_from_csv(tspt::read_csv(trend_opts.data_path), trend_column);
    const tspt::TestOutcome outcome = tspt::trend_perm_test(series, cfg);
    emit_report(tspt::render_test_report(invocation, outcome, seconds_since(start)),
                trend_opts.out_path, tspt::summary_line(outcome));
  } else if (lb->parsed()) {
    const tspt::Series series =
        tspt::series_from_csv(tspt::read_csv(lb_opts.data_path), lb_column);
    const tspt::TestOutcome outcome =
        tspt::ljung_box_perm_test(series, lb_lags, config_from(lb_opts));
    emit_report(tspt::render_test_report(invocation, outcome, seconds_since(start)),
                lb_opts.out_path, tspt::summary_line(outcome));
  } else if (cc->parsed()) {
    const tspt::Dataset data =
        tspt::dataset_from_csv(tspt::read_csv(cc_opts.data_path), cc_response);
    const tspt::TestOutcome outcome =
        tspt::cross_correlation_perm_test(data, cc_lags, config_from(cc_opts));
    emit_report(tspt::render_test_report(invocation, outcome, seconds_since(start)),
                cc_opts.out_path, tspt::summary_line(outcome));
  } else if (cw->parsed()) {
    const tspt::Dataset data =
        tspt::dataset_from_csv(tspt::read_csv(cw_opts.data_path), cw_response);
    const tspt::TestOutcome outcome = tspt::classical_wald_test(data, cw_opts.alpha, cw_as_printed);
    emit_report(tspt::render_test_report(invocation, outcome, seconds_since(start)),
                cw_opts.out_path, tspt::summary_line(outcome));
  } else if (sim->parsed()) {
    tspt::DgpSpec spec;
    spec.kind = [&] {
      if (sim_dgp == "mdep-reg") return tspt::DgpKind::MdepRegression;
      if (sim_dgp == "var2") return tspt::DgpKind::Var2;
      if (sim_dgp == "ar1") return tspt::DgpKind::Ar1;
      if (sim_dgp == "mdep-series") return tspt::DgpKind::MdepSeries;
      if (sim_dgp == "iid-gauss") return tspt::DgpKind::IidGauss;
      tspt::fail(tspt::ErrorCode::InvalidConfig, "unknown --dgp \"" + sim_dgp + "\"");
    }();
    spec.m = sim_m;
    spec.p = sim_p;
    spec.rho = sim_rho;
    if (sim_trend_h && !sim_trend_g.empty()) {
      tspt::fail(tspt::ErrorCode::InvalidConfig, "--trend-h and --trend-g are exclusive");
    }
    if (sim_trend_h) spec.trend = tspt::LinearTrend{*sim_trend_h};
    if (!sim_trend_g.empty()) spec.trend = tspt::TabulatedTrend{sim_trend_g};

    const auto generated = tspt::generate(spec, sim_n, sim_seed);
    if (std::holds_alternative<tspt::Dataset>(generated)) {
      const auto& data = std::get<tspt::Dataset>(generated);
      std::vector<std::string> header{"y"};
      for (Eigen::Index j = 1; j <= data.p(); ++j) header.push_back("x" + std::to_string(j));
      Eigen::MatrixXd cells(data.n(), data.p() + 1);
      cells.col(0) = data.y();
      cells.rightCols(data.p()) = data.x();
      tspt::write_csv(sim_out, header, cells);
      std::cout << "simulate: " << spec.label() << " n=" << sim_n << " -> " << sim_out << "\n";
    } else {
      const auto& series = std::get<tspt::Series>(generated);
      tspt::write_csv(sim_out, {"y"}, series.values());
      std::cout << "simulate: " << spec.label() << " n=" << sim_n << " -> " << sim_out << "\n";
    }
  } else if (study->parsed()) {
    std::ifstream in(study_spec_path, std::ios::binary);
    if (!in) {
      tspt::fail(tspt::ErrorCode::FileNotFound, "cannot open \"" + study_spec_path + "\"");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    run_study_command(tspt::parse_study_spec(buffer.str()), study_threads, study_out, study_csv);
  } else if (repro->parsed()) {
    run_study_command(tspt::table_study(repro_table, repro_scale, repro_seed), repro_threads,
                      repro_out, repro_csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const tspt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case tspt::ErrorKind::Usage: return 1;
      case tspt::ErrorKind::Data: return 2;
      case tspt::ErrorKind::Numerical: return 3;
    }
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
