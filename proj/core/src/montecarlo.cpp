#include "tspt/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "tspt/rng.hpp"

namespace tspt {

namespace {

using nlohmann::json;

constexpr std::uint64_t kTagCell = 0x6D632E63656C6Cull;  // harness cell stream
constexpr std::uint64_t kTagDgp = 0x646770ull;           // data generation stream
constexpr std::uint64_t kTagTest = 0x74657374ull;        // permutation stream

bool is_series_method(Method method) {
  return method == Method::PermTrendStud || method == Method::PermTrendUnstud ||
         method == Method::PermLjungBox;
}

TestOutcome run_method(const MethodSpec& method, const std::variant<Dataset, Series>& data,
                       const TestConfig& cfg) {
  switch (method.method) {
    case Method::PermRegStud:
    case Method::PermRegUnstud: {
      TestConfig sub = cfg;
      sub.studentize = method.method == Method::PermRegStud;
      return regression_perm_test(std::get<Dataset>(data), sub);
    }
    case Method::ClassicalWald:
      return classical_wald_test(std::get<Dataset>(data), cfg.alpha);
    case Method::PermTrendStud:
    case Method::PermTrendUnstud: {
      TestConfig sub = cfg;
      sub.studentize = method.method == Method::PermTrendStud;
      return trend_perm_test(std::get<Series>(data), sub);
    }
    case Method::PermLjungBox:
      return ljung_box_perm_test(std::get<Series>(data), method.lags.at(0), cfg);
    case Method::PermCrossCorr:
      return cross_correlation_perm_test(std::get<Dataset>(data), method.lags, cfg);
  }
  fail(ErrorCode::InvalidConfig, "unknown method");
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 0xCBF29CE484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001B3ull;
  }
  return hash;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

json trend_to_json(const TrendSpec& trend) {
  json j;
  if (const auto* linear = std::get_if<LinearTrend>(&trend)) {
    j["h"] = linear->h;
  } else {
    j["g"] = std::get<TabulatedTrend>(trend).values;
  }
  return j;
}

TrendSpec trend_from_json(const json& j) {
  if (j.contains("h")) return LinearTrend{j.at("h").get<double>()};
  if (j.contains("g")) return TabulatedTrend{j.at("g").get<std::vector<double>>()};
  fail(ErrorCode::ParseError, "trend object needs either \"h\" or \"g\"");
}

json dgp_to_json(const DgpSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  switch (spec.kind) {
    case DgpKind::MdepRegression:
      j["m"] = spec.m;
      j["p"] = spec.p;
      break;
    case DgpKind::MdepSeries: j["m"] = spec.m; break;
    case DgpKind::Var2:
    case DgpKind::Ar1: j["rho"] = spec.rho; break;
    case DgpKind::IidGauss: break;
  }
  if (spec.trend) j["trend"] = trend_to_json(*spec.trend);
  return j;
}

DgpKind dgp_kind_from_string(const std::string& name) {
  if (name == "mdep-reg") return DgpKind::MdepRegression;
  if (name == "var2") return DgpKind::Var2;
  if (name == "ar1") return DgpKind::Ar1;
  if (name == "mdep-series") return DgpKind::MdepSeries;
  if (name == "iid-gauss") return DgpKind::IidGauss;
  fail(ErrorCode::ParseError, "unknown dgp kind \"" + name + "\"");
}

DgpSpec dgp_from_json(const json& j) {
  DgpSpec spec;
  spec.kind = dgp_kind_from_string(j.at("kind").get<std::string>());
  spec.m = j.value("m", 0);
  spec.p = j.value("p", 3);
  spec.rho = j.value("rho", 0.0);
  if (j.contains("trend")) spec.trend = trend_from_json(j.at("trend"));
  validate_dgp(spec);
  return spec;
}

Method method_from_string(const std::string& name) {
  for (Method method :
       {Method::PermRegStud, Method::PermRegUnstud, Method::ClassicalWald, Method::PermTrendStud,
        Method::PermTrendUnstud, Method::PermLjungBox, Method::PermCrossCorr}) {
    if (name == to_string(method)) return method;
  }
  fail(ErrorCode::ParseError, "unknown method \"" + name + "\"");
}

json method_to_json(const MethodSpec& spec) {
  json j;
  j["method"] = to_string(spec.method);
  j["permutations"] = spec.config.permutations;
  if (spec.config.bandwidth) {
    j["bandwidth"] = *spec.config.bandwidth;
  } else {
    j["bandwidth"] = "auto";
  }
  if (spec.config.floor) j["floor"] = *spec.config.floor;
  j["region"] = spec.config.region == Region::Sphere ? "sphere" : "box";
  j["tail"] = spec.config.tail == Tail::Upper ? "upper" : "two-sided";
  if (!spec.lags.empty()) j["lags"] = spec.lags;
  return j;
}

MethodSpec method_from_json(const json& j) {
  MethodSpec spec;
  spec.method = method_from_string(j.at("method").get<std::string>());
  spec.config.permutations = j.value("permutations", kDefaultPermutations);
  if (j.contains("bandwidth") && j.at("bandwidth").is_number_integer()) {
    spec.config.bandwidth = j.at("bandwidth").get<int>();
  }
  if (j.contains("floor")) spec.config.floor = j.at("floor").get<double>();
  if (j.value("region", "sphere") == std::string("box")) spec.config.region = Region::Box;
  if (j.value("tail", "upper") == std::string("two-sided")) spec.config.tail = Tail::TwoSided;
  if (j.contains("lags")) spec.lags = j.at("lags").get<std::vector<int>>();
  return spec;
}

std::string cell_identity(const DgpSpec& dgp, int n, const MethodSpec& method) {
  return dgp.label() + "|" + std::to_string(n) + "|" + method.label();
}

}  // namespace

std::string MethodSpec::label() const {
  std::string out = to_string(method);
  if (method == Method::PermLjungBox && !lags.empty()) {
    out += "(p=" + std::to_string(lags.front()) + ")";
  }
  if (method == Method::PermCrossCorr && !lags.empty()) {
    out += "(lags=";
    for (std::size_t i = 0; i < lags.size(); ++i) {
      if (i > 0) out += ",";
      out += std::to_string(lags[i]);
    }
    out += ")";
  }
  return out;
}

void validate_study(const StudySpec& spec) {
  if (spec.dgps.empty()) fail(ErrorCode::InvalidConfig, "study needs at least one dgp");
  if (spec.n_grid.empty()) fail(ErrorCode::InvalidConfig, "study needs a nonempty n grid");
  if (spec.methods.empty()) fail(ErrorCode::InvalidConfig, "study needs at least one method");
  if (spec.replications < 1) fail(ErrorCode::InvalidConfig, "replications must be at least 1");
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) {
    fail(ErrorCode::InvalidConfig, "alpha must lie in (0, 1)");
  }
  for (int n : spec.n_grid) {
    if (n < 3) fail(ErrorCode::InvalidConfig, "grid sample sizes must be at least 3");
  }
  for (const DgpSpec& dgp : spec.dgps) validate_dgp(dgp);
  for (const MethodSpec& method : spec.methods) {
    if (method.method == Method::PermLjungBox && method.lags.empty()) {
      fail(ErrorCode::InvalidConfig, "perm-ljung-box needs a lag order in \"lags\"");
    }
    for (const DgpSpec& dgp : spec.dgps) {
      if (dgp.is_series() != is_series_method(method.method)) {
        fail(ErrorCode::InvalidConfig,
             "method " + method.label() + " cannot consume dgp " + dgp.label());
      }
    }
  }
}

std::pair<double, double> summarize(const std::vector<bool>& outcomes) {
  if (outcomes.empty()) fail(ErrorCode::EmptyInput, "no replication outcomes to summarize");
  const auto r = static_cast<double>(outcomes.size());
  double count = 0.0;
  for (bool rejected : outcomes) count += rejected ? 1.0 : 0.0;
  const double rate = count / r;
  return {rate, std::sqrt(rate * (1.0 - rate) / r)};
}

McReport run_study(const StudySpec& spec, int threads, const ProgressFn& progress) {
  validate_study(spec);

  struct Cell {
    const DgpSpec* dgp;
    int n;
    const MethodSpec* method;
    std::uint64_t id_hash;
  };
  std::vector<Cell> cells;
  for (const DgpSpec& dgp : spec.dgps) {
    for (int n : spec.n_grid) {
      for (const MethodSpec& method : spec.methods) {
        cells.push_back({&dgp, n, &method, fnv1a64(cell_identity(dgp, n, method))});
      }
    }
  }

  // Replication seeds depend on cell identity, not position, so reordering
  // cells cannot change any cell's result. Collisions abort up front.
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(cells.size() * static_cast<std::size_t>(spec.replications));
  for (const Cell& cell : cells) {
    for (int r = 0; r < spec.replications; ++r) {
      const std::uint64_t seed =
          derive_seed({spec.master_seed, kTagCell, cell.id_hash, static_cast<std::uint64_t>(r)});
      if (!seen.insert(seed).second) {
        fail(ErrorCode::InvalidConfig,
             "replication seed collision detected; choose a different master seed "
             "or remove duplicate cells (cell " +
                 cell_identity(*cell.dgp, cell.n, *cell.method) + ")");
      }
    }
  }

  McReport report;
  report.master_seed = spec.master_seed;
  report.spec_hash = hex64(fnv1a64(study_spec_to_json(spec)));

  const int workers = std::max(1, threads);
  for (const Cell& cell : cells) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<bool> rejects(static_cast<std::size_t>(spec.replications), false);

    std::mutex error_mutex;
    std::optional<Error> first_error;
    std::atomic<bool> failed{false};

    auto run_range = [&](int begin, int end) {
      for (int r = begin; r < end; ++r) {
        if (failed.load(std::memory_order_relaxed)) return;
        const std::uint64_t rep_seed = derive_seed(
            {spec.master_seed, kTagCell, cell.id_hash, static_cast<std::uint64_t>(r)});
        try {
          const auto data = generate(*cell.dgp, cell.n, derive_seed({rep_seed, kTagDgp}));
          TestConfig cfg = cell.method->config;
          cfg.alpha = spec.alpha;
          cfg.seed = derive_seed({rep_seed, kTagTest});
          cfg.threads = 1;
          cfg.keep_samples = false;
          rejects[static_cast<std::size_t>(r)] = run_method(*cell.method, data, cfg).reject;
        } catch (const Error& e) {
          std::scoped_lock lock(error_mutex);
          if (!first_error) {
            first_error.emplace(Error::with_context(
                e, "cell " + cell_identity(*cell.dgp, cell.n, *cell.method) + ", replication " +
                       std::to_string(r)));
          }
          failed.store(true, std::memory_order_relaxed);
          return;
        }
      }
    };

    if (workers == 1 || spec.replications == 1) {
      run_range(0, spec.replications);
    } else {
      std::vector<std::thread> pool;
      const int span = std::min(workers, spec.replications);
      pool.reserve(static_cast<std::size_t>(span));
      for (int t = 0; t < span; ++t) {
        const int begin = static_cast<int>(
            static_cast<long long>(spec.replications) * t / span);
        const int end = static_cast<int>(
            static_cast<long long>(spec.replications) * (t + 1) / span);
        pool.emplace_back(run_range, begin, end);
      }
      for (auto& th : pool) th.join();
    }
    if (first_error) throw *first_error;

    auto [rate, se] = summarize(rejects);
    McCell result;
    result.dgp = cell.dgp->label();
    result.n = cell.n;
    result.method = cell.method->label();
    result.rejection_rate = rate;
    result.mc_se = se;
    result.replications = spec.replications;
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.cells.push_back(result);
    if (progress) progress(result);
  }
  return report;
}

StudySpec parse_study_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, std::string("study spec is not valid JSON: ") + e.what());
  }
  StudySpec spec;
  try {
    spec.master_seed = j.value("master_seed", 0ull);
    spec.alpha = j.value("alpha", 0.05);
    spec.replications = j.value("replications", 1000);
    spec.n_grid = j.at("n").get<std::vector<int>>();
    for (const json& dgp : j.at("dgps")) spec.dgps.push_back(dgp_from_json(dgp));
    for (const json& method : j.at("methods")) spec.methods.push_back(method_from_json(method));
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("study spec is malformed: ") + e.what());
  }
  validate_study(spec);
  return spec;
}

std::string study_spec_to_json(const StudySpec& spec) {
  json j;
  j["master_seed"] = spec.master_seed;
  j["alpha"] = spec.alpha;
  j["replications"] = spec.replications;
  j["n"] = spec.n_grid;
  j["dgps"] = json::array();
  for (const DgpSpec& dgp : spec.dgps) j["dgps"].push_back(dgp_to_json(dgp));
  j["methods"] = json::array();
  for (const MethodSpec& method : spec.methods) j["methods"].push_back(method_to_json(method));
  return j.dump(2);
}

std::string mc_report_to_json(const McReport& report) {
  json j;
  j["master_seed"] = report.master_seed;
  j["spec_hash"] = report.spec_hash;
  j["cells"] = json::array();
  for (const McCell& cell : report.cells) {
    json c;
    c["dgp"] = cell.dgp;
    c["n"] = cell.n;
    c["method"] = cell.method;
    c["rejection_rate"] = cell.rejection_rate;
    c["mc_se"] = cell.mc_se;
    c["replications"] = cell.replications;
    c["elapsed_seconds"] = cell.elapsed_seconds;
    j["cells"].push_back(c);
  }
  return j.dump(2);
}

std::string mc_report_to_csv(const McReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "dgp,n,method,rejection_rate,mc_se,replications,elapsed_seconds\n";
  for (const McCell& cell : report.cells) {
    out << cell.dgp << "," << cell.n << "," << cell.method << "," << cell.rejection_rate << ","
        << cell.mc_se << "," << cell.replications << "," << cell.elapsed_seconds << "\n";
  }
  return out.str();
}

StudySpec table_study(int table, double scale, std::uint64_t master_seed) {
  if (scale <= 0.0) fail(ErrorCode::InvalidConfig, "scale must be positive");
  StudySpec spec;
  spec.master_seed = master_seed;
  spec.alpha = 0.05;
  spec.replications = std::max(1, static_cast<int>(std::lround(1000.0 * scale)));

  MethodSpec reg_stud{Method::PermRegStud, TestConfig{}, {}};
  MethodSpec classical{Method::ClassicalWald, TestConfig{}, {}};
  MethodSpec trend_stud{Method::PermTrendStud, TestConfig{}, {}};
  MethodSpec trend_unstud{Method::PermTrendUnstud, TestConfig{}, {}};

  switch (table) {
    case 1:
      for (int m : {0, 1, 2, 3}) {
        spec.dgps.push_back({DgpKind::MdepRegression, m, 3, 0.0, {}});
      }
      spec.n_grid = {50, 100, 500, 1000, 10000};
      spec.methods = {reg_stud, classical};
      break;
    case 2:
      for (double rho : {-0.8, -0.5, 0.5, 0.8}) {
        spec.dgps.push_back({DgpKind::Var2, 0, 3, rho, {}});
      }
      spec.n_grid = {50, 100, 500, 1000, 10000};
      spec.methods = {reg_stud, classical};
      break;
    case 3:
      for (int m : {0, 1, 2, 3}) {
        spec.dgps.push_back({DgpKind::MdepSeries, m, 1, 0.0, {}});
      }
      spec.n_grid = {20, 50, 100, 500, 1000};
      spec.methods = {trend_stud, trend_unstud};
      break;
    case 4:
      for (double rho : {-0.6, -0.2, 0.2, 0.6}) {
        spec.dgps.push_back({DgpKind::Ar1, 0, 1, rho, {}});
      }
      spec.n_grid = {20, 50, 100, 500, 1000};
      spec.methods = {trend_stud, trend_unstud};
      break;
    default:
      fail(ErrorCode::InvalidConfig, "table must be 1, 2, 3, or 4");
  }

  if (scale < 1.0) {
    std::erase_if(spec.n_grid, [](int n) { return n >= 5000; });
  }
  return spec;
}

}  // namespace tspt
