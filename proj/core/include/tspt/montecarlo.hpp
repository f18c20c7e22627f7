#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tspt/data.hpp"
#include "tspt/dgp.hpp"
#include "tspt/testing.hpp"

namespace tspt {

/// A method under study: the procedure plus its configuration template. The
/// per-replication seed is filled in by the harness; `lags` feeds the
/// autocorrelation / cross-correlation procedures.
struct MethodSpec {
  Method method = Method::PermRegStud;
  TestConfig config{};
  std::vector<int> lags{};

  std::string label() const;
};

struct StudySpec {
  std::vector<DgpSpec> dgps;
  std::vector<int> n_grid;
  std::vector<MethodSpec> methods;
  int replications = 1000;
  std::uint64_t master_seed = 0;
  double alpha = 0.05;
};

void validate_study(const StudySpec& spec);

struct McCell {
  std::string dgp;
  int n = 0;
  std::string method;
  double rejection_rate = 0.0;
  double mc_se = 0.0;
  int replications = 0;
  double elapsed_seconds = 0.0;
};

struct McReport {
  std::vector<McCell> cells;
  std::uint64_t master_seed = 0;
  std::string spec_hash;
};

/// rate = mean, mc_se = sqrt(rate (1 - rate) / R). Throws EMPTY_INPUT.
std::pair<double, double> summarize(const std::vector<bool>& outcomes);

using ProgressFn = std::function<void(const McCell&)>;

/// Runs every (dgp, n, method) cell for `replications` independent
/// replications. Per-replication seeds derive from (master seed, cell
/// identity, replication index), so results are bit-identical across thread
/// counts and cell orderings; a replication failure aborts the study with the
/// offending cell and index named. Statistical payload is deterministic;
/// elapsed_seconds is wall time and excluded from that guarantee.
McReport run_study(const StudySpec& spec, int threads = 1, const ProgressFn& progress = {});

StudySpec parse_study_spec(const std::string& json_text);
std::string study_spec_to_json(const StudySpec& spec);
std::string mc_report_to_json(const McReport& report);
std::string mc_report_to_csv(const McReport& report);

/// Simulation-table presets (1: regression product designs, 2: VAR(2),
/// 3: trend product designs, 4: trend AR(1)). `scale` multiplies the
/// replication count; any scale below 1 also drops the n >= 5000 grid points
/// so desk-scale runs finish in minutes.
StudySpec table_study(int table, double scale = 0.1,
                      std::uint64_t master_seed = 20240901ull);

}  // namespace tspt
