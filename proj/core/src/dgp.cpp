#include "tspt/dgp.hpp"

#include <cmath>
#include <sstream>

#include "tspt/rng.hpp"

namespace tspt {

namespace {

// Stream tags for the independent substreams a generator may need.
constexpr std::uint64_t kStreamProduct = 1;
constexpr std::uint64_t kStreamNoise = 2;

double interp_table(const std::vector<double>& table, double t) {
  if (table.size() == 1) return table.front();
  const double pos = t * static_cast<double>(table.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= table.size()) return table.back();
  const double frac = pos - static_cast<double>(lo);
  return table[lo] * (1.0 - frac) + table[lo + 1] * frac;
}

}  // namespace

const char* to_string(DgpKind kind) noexcept {
  switch (kind) {
    case DgpKind::MdepRegression: return "mdep-reg";
    case DgpKind::Var2: return "var2";
    case DgpKind::Ar1: return "ar1";
    case DgpKind::MdepSeries: return "mdep-series";
    case DgpKind::IidGauss: return "iid-gauss";
  }
  return "unknown";
}

bool DgpSpec::is_series() const noexcept {
  return kind == DgpKind::Ar1 || kind == DgpKind::MdepSeries || kind == DgpKind::IidGauss;
}

std::string DgpSpec::label() const {
  std::ostringstream out;
  out << to_string(kind);
  switch (kind) {
    case DgpKind::MdepRegression: out << "(m=" << m << ",p=" << p << ")"; break;
    case DgpKind::MdepSeries: out << "(m=" << m << ")"; break;
    case DgpKind::Var2:
    case DgpKind::Ar1: out << "(rho=" << rho << ")"; break;
    case DgpKind::IidGauss: break;
  }
  if (trend) {
    if (const auto* linear = std::get_if<LinearTrend>(&*trend)) {
      out << "+trend(h=" << linear->h << ")";
    } else {
      out << "+trend(table)";
    }
  }
  return out.str();
}

void validate_dgp(const DgpSpec& spec) {
  if (spec.m < 0) fail(ErrorCode::InvalidConfig, "dependence parameter m must be nonnegative");
  if (spec.kind == DgpKind::MdepRegression && spec.p < 1) {
    fail(ErrorCode::InvalidConfig, "covariate dimension p must be positive");
  }
  if ((spec.kind == DgpKind::Var2 || spec.kind == DgpKind::Ar1) && !(std::abs(spec.rho) < 1.0)) {
    fail(ErrorCode::InvalidConfig, "|rho| must be below 1 for a stationary process");
  }
  if (spec.trend && !spec.is_series()) {
    fail(ErrorCode::InvalidConfig, "trend injection applies to series designs only");
  }
  if (spec.trend) {
    if (const auto* table = std::get_if<TabulatedTrend>(&*spec.trend)) {
      if (table->values.empty()) {
        fail(ErrorCode::InvalidConfig, "tabulated trend needs at least one value");
      }
    }
  }
}

Dataset gen_mdep_regression(int m, int p, int n, std::uint64_t seed) {
  if (m < 0 || p < 1 || n < 1) fail(ErrorCode::InvalidConfig, "need m >= 0, p >= 1, n >= 1");
  Rng product_rng(seed, kStreamProduct);
  Rng noise_rng(seed, kStreamNoise);

  // m = 0: t == 1, so response and covariates are independent i.i.d. Gaussians.
  // m >= 1: t_i = prod_{j=0}^{m} xi_{i+j}, giving dependence range exactly m
  // and the shared-factor fourth moment 3^(m+1) that drives the classical
  // test's overrejection in this design.
  const int factors = m == 0 ? 0 : m + 1;
  Eigen::VectorXd xi(n + std::max(0, factors - 1));
  product_rng.fill_gaussian({xi.data(), static_cast<std::size_t>(xi.size())});
  Eigen::VectorXd t = Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < factors; ++j) t[i] *= xi[i + j];
  }

  Eigen::VectorXd y(n);
  Eigen::MatrixXd x(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) x(i, j) = t[i] * noise_rng.next_gaussian();
    y[i] = t[i] * noise_rng.next_gaussian();
  }
  return Dataset(std::move(y), std::move(x));
}

Eigen::Matrix3d var2_q() {
  Eigen::Matrix3d q;
  const double s3 = 1.0 / std::sqrt(3.0);
  const double s2 = 1.0 / std::sqrt(2.0);
  const double s6 = 1.0 / std::sqrt(6.0);
  q << s3, s2, s6,
       s3, -s2, s6,
       s3, 0.0, -2.0 * s6;
  return q;
}

Eigen::Matrix3d var2_r(double rho) {
  const Eigen::Matrix3d q = var2_q();
  const Eigen::Vector3d d(rho, rho, -rho);
  return q * d.asDiagonal() * q.transpose();
}

Dataset gen_var2(double rho, int n, std::uint64_t seed) {
  if (!(std::abs(rho) < 1.0)) fail(ErrorCode::InvalidConfig, "|rho| must be below 1");
  if (n < 1) fail(ErrorCode::InvalidConfig, "need n >= 1");
  Rng rng(seed, kStreamNoise);
  const Eigen::Matrix3d r = var2_r(rho);

  // Both interleaved chains start at the exact stationary law
  // N(0, I / (1 - rho^2)); R has eigenvalues {rho, rho, -rho}, so the
  // stationary covariance S = R S R' + I is isotropic.
  const double init_sd = 1.0 / std::sqrt(1.0 - rho * rho);
  const int total = n + 1;  // y_i = x_{i+1, 1} needs one extra step
  Eigen::MatrixXd chain(total, 3);
  Eigen::Vector3d noise;
  for (int i = 0; i < total; ++i) {
    noise << rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian();
    if (i < 2) {
      chain.row(i) = (init_sd * noise).transpose();
    } else {
      chain.row(i) = (r * chain.row(i - 2).transpose() + noise).transpose();
    }
  }

  Eigen::VectorXd y(n);
  Eigen::MatrixXd x = chain.topRows(n);
  for (int i = 0; i < n; ++i) y[i] = chain(i + 1, 0);
  return Dataset(std::move(y), std::move(x));
}

Series gen_ar1(double rho, int n, std::uint64_t seed) {
  if (!(std::abs(rho) < 1.0)) fail(ErrorCode::InvalidConfig, "|rho| must be below 1");
  if (n < 3) fail(ErrorCode::TooFewRows, "series generation needs n >= 3");
  Rng rng(seed, kStreamNoise);
  Eigen::VectorXd values(n);
  values[0] = rng.next_gaussian() / std::sqrt(1.0 - rho * rho);
  for (int i = 1; i < n; ++i) values[i] = rho * values[i - 1] + rng.next_gaussian();
  return Series(std::move(values));
}

Series gen_mdep_series(int m, int n, std::uint64_t seed) {
  if (m < 0) fail(ErrorCode::InvalidConfig, "need m >= 0");
  if (n < 3) fail(ErrorCode::TooFewRows, "series generation needs n >= 3");
  Rng rng(seed, kStreamProduct);
  // x_i = prod_{j=0}^{m} z_{i+j}: m + 1 factors, so m = 0 is i.i.d. and the
  // dependence range equals m.
  Eigen::VectorXd z(n + m);
  rng.fill_gaussian({z.data(), static_cast<std::size_t>(z.size())});
  Eigen::VectorXd values = Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= m; ++j) values[i] *= z[i + j];
  }
  return Series(std::move(values));
}

Series gen_iid_gauss(int n, std::uint64_t seed) { return gen_mdep_series(0, n, seed); }

Series apply_trend(const Series& series, const TrendSpec& trend) {
  const Eigen::Index n = series.n();
  const double nd = static_cast<double>(n);
  Eigen::VectorXd shifted = series.values();
  if (const auto* linear = std::get_if<LinearTrend>(&trend)) {
    const double scale = linear->h / (nd * std::sqrt(nd));
    for (Eigen::Index i = 0; i < n; ++i) {
      shifted[i] += scale * static_cast<double>(i + 1);
    }
    return Series(std::move(shifted));
  }
  const auto& table = std::get<TabulatedTrend>(trend).values;
  if (table.empty()) fail(ErrorCode::InvalidConfig, "tabulated trend needs at least one value");
  bool nondecreasing = true;
  bool nonincreasing = true;
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (table[i] < table[i - 1]) nondecreasing = false;
    if (table[i] > table[i - 1]) nonincreasing = false;
  }
  if (!nondecreasing && !nonincreasing) {
    fail(ErrorCode::NonMonotoneTrend, "tabulated trend values are not monotone");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    shifted[i] += interp_table(table, static_cast<double>(i + 1) / nd);
  }
  return Series(std::move(shifted));
}

std::variant<Dataset, Series> generate(const DgpSpec& spec, int n, std::uint64_t seed) {
  validate_dgp(spec);
  switch (spec.kind) {
    case DgpKind::MdepRegression: return gen_mdep_regression(spec.m, spec.p, n, seed);
    case DgpKind::Var2: return gen_var2(spec.rho, n, seed);
    case DgpKind::Ar1: {
      Series series = gen_ar1(spec.rho, n, seed);
      return spec.trend ? apply_trend(series, *spec.trend) : std::move(series);
    }
    case DgpKind::MdepSeries: {
      Series series = gen_mdep_series(spec.m, n, seed);
      return spec.trend ? apply_trend(series, *spec.trend) : std::move(series);
    }
    case DgpKind::IidGauss: {
      Series series = gen_iid_gauss(n, seed);
      return spec.trend ? apply_trend(series, *spec.trend) : std::move(series);
    }
  }
  fail(ErrorCode::InvalidConfig, "unknown generator kind");
}

}  // namespace tspt
