#include "tspt/testing.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>
#include <string>

#include "tspt/estimators.hpp"

namespace tspt {

namespace {

constexpr double kSingularRelTol = 1e-12;

/// Rejects genuinely rank-deficient covariate covariances (collinear columns)
/// regardless of the floor; the floor only rescues small positive spectra.
void require_nonsingular_sigma(const Eigen::VectorXd& eigenvalues) {
  const double lambda_max = eigenvalues.cwiseAbs().maxCoeff();
  if (eigenvalues.minCoeff() <= kSingularRelTol * std::max(lambda_max, 1e-300)) {
    fail(ErrorCode::SingularCovariance, "covariate covariance is rank deficient");
  }
}

struct SigmaSpectral {
  Eigen::MatrixXd inverse;
  Eigen::MatrixXd matrix;
  bool floored = false;
};

SigmaSpectral checked_sigma_inverse(const Eigen::MatrixXd& sigma_x, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_x);
  if (es.info() != Eigen::Success) {
    fail(ErrorCode::SingularCovariance, "eigendecomposition of covariate covariance failed");
  }
  require_nonsingular_sigma(es.eigenvalues());
  SigmaSpectral out;
  out.matrix = sigma_x;
  Eigen::VectorXd lambda = es.eigenvalues();
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (floor > 0.0 && lambda[i] < floor) {
      lambda[i] = floor;
      out.floored = true;
    }
  }
  out.inverse =
      es.eigenvectors() * lambda.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  return out;
}

int resolve_bandwidth(const TestConfig& cfg, Eigen::Index n) {
  const int bandwidth = cfg.bandwidth ? *cfg.bandwidth : default_bandwidth(n);
  if (bandwidth < 1 || bandwidth >= n) {
    fail(ErrorCode::BandwidthTooLarge, "bandwidth " + std::to_string(bandwidth) +
                                           " must satisfy 1 <= b < n = " + std::to_string(n));
  }
  return bandwidth;
}

/// Fused evaluator for the regression-family statistics. Permutation-invariant
/// pieces (column means, sigma_x spectra, sigma_y^2) are computed once; the
/// long-run covariance is rebuilt for every permuted arrangement.
class RegressionEngine {
 public:
  RegressionEngine(const Dataset& data, const TestConfig& cfg, int bandwidth, double floor,
                   int threads)
      : data_(data),
        bandwidth_(bandwidth),
        floor_(floor),
        studentize_(cfg.studentize),
        region_(cfg.region) {
    const auto n = static_cast<double>(data.n());
    x_mean_ = data.x().colwise().mean();
    y_mean_ = data.y().mean();
    xc_ = data.x().rowwise() - x_mean_.transpose();
    yc_ = data.y().array() - y_mean_;
    sigma_y2_ = yc_.squaredNorm() / n;

    auto sigma = checked_sigma_inverse((xc_.transpose() * xc_) / n, floor_);
    sigma_x_ = std::move(sigma.matrix);
    sigma_inv_ = std::move(sigma.inverse);
    base_floored_ = sigma.floored;

    if (!studentize_) {
      const Eigen::MatrixXd limit = sigma_y2_ * sigma_x_;
      bool clipped = false;
      if (region_ == Region::Sphere) {
        unstud_transform_ = detail::spectral_inverse(limit, floor_, &clipped);
      } else {
        unstud_transform_ = detail::spectral_inverse_sqrt(limit, floor_, &clipped);
      }
      base_floored_ = base_floored_ || clipped;
    }
    scratch_.resize(static_cast<std::size_t>(std::max(1, threads)));
  }

  double eval(std::span<const int> perm, int slot, bool* floored_out = nullptr) const {
    auto& s = scratch_[static_cast<std::size_t>(slot)];
    const Eigen::Index n = data_.n();
    const Eigen::Index p = data_.p();
    const double nd = static_cast<double>(n);

    s.cross.setZero(p);
    for (Eigen::Index i = 0; i < n; ++i) {
      s.cross.noalias() += yc_[i] * xc_.row(perm[static_cast<std::size_t>(i)]).transpose();
    }
    s.cross /= nd;
    s.beta.noalias() = sigma_inv_ * s.cross;

    bool floored = base_floored_;
    double stat = 0.0;
    const Eigen::VectorXd projected = sigma_x_ * s.beta;
    if (studentize_) {
      s.resid.resize(n);
      s.products.resize(n, p);
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = data_.x().row(perm[static_cast<std::size_t>(i)]);
        s.resid[i] = data_.y()[i] - row.dot(s.beta);
        s.products.row(i) = row * s.resid[i];
      }
      const Eigen::MatrixXd raw = detail::hac_raw_from_products(s.products, bandwidth_);
      bool clipped = false;
      if (region_ == Region::Sphere) {
        // invert the raw estimator through its SVD with truncated singular
        // values; the skew noise component keeps the inverse well scaled
        const Eigen::MatrixXd inv = detail::svd_truncated_inverse(raw, floor_, &clipped);
        stat = nd * projected.dot(inv * projected);
      } else {
        // the max-coordinate region needs a genuine inverse square root, so it
        // goes through the symmetrized, floored estimator
        const Eigen::MatrixXd sym = 0.5 * (raw + raw.transpose());
        const Eigen::MatrixXd inv_sqrt = detail::spectral_inverse_sqrt(sym, floor_, &clipped);
        stat = std::sqrt(nd) * (inv_sqrt * projected).cwiseAbs().maxCoeff();
      }
      floored = floored || clipped;
    } else {
      if (region_ == Region::Sphere) {
        stat = nd * projected.dot(unstud_transform_ * projected);
      } else {
        stat = std::sqrt(nd) * (unstud_transform_ * projected).cwiseAbs().maxCoeff();
      }
    }
    if (floored_out != nullptr) *floored_out = floored;
    return stat;
  }

 private:
  struct Scratch {
    Eigen::VectorXd cross;
    Eigen::VectorXd beta;
    Eigen::VectorXd resid;
    Eigen::MatrixXd products;
  };

  const Dataset& data_;
  int bandwidth_;
  double floor_;
  bool studentize_;
  Region region_;
  Eigen::VectorXd x_mean_;
  double y_mean_ = 0.0;
  Eigen::MatrixXd xc_;
  Eigen::VectorXd yc_;
  Eigen::MatrixXd sigma_x_;
  Eigen::MatrixXd sigma_inv_;
  double sigma_y2_ = 0.0;
  Eigen::MatrixXd unstud_transform_;
  bool base_floored_ = false;
  mutable std::vector<Scratch> scratch_;
};

/// Fused evaluator for the trend statistics under series permutation.
class TrendEngine {
 public:
  TrendEngine(const Series& series, bool studentize, int bandwidth, double floor, int threads)
      : series_(series), studentize_(studentize), bandwidth_(bandwidth), floor_(floor) {
    const Eigen::Index n = series.n();
    const double nd = static_cast<double>(n);
    const double center = (nd + 1.0) / 2.0;
    weights_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) weights_[i] = static_cast<double>(i + 1) - center;
    denom_ = nd * (nd * nd - 1.0) / 12.0;
    scale_ = nd * std::sqrt(nd);
    vbar_ = series.values().mean();
    scratch_.resize(static_cast<std::size_t>(std::max(1, threads)));
  }

  double eval(std::span<const int> perm, int slot, bool* floored_out = nullptr) const {
    auto& pv = scratch_[static_cast<std::size_t>(slot)];
    const Eigen::Index n = series_.n();
    pv.resize(n);
    double num = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      pv[i] = series_.values()[perm[static_cast<std::size_t>(i)]];
      num += weights_[i] * (pv[i] - vbar_);
    }
    bool floored = false;
    double stat;
    if (!studentize_) {
      stat = num / scale_;  // T_n
    } else {
      const double raw = detail::trend_tau2_raw(pv, bandwidth_);
      double tau2 = raw;
      if (floor_ > 0.0) {
        if (raw < floor_) {
          tau2 = floor_;
          floored = true;
        }
      } else if (raw <= 0.0) {
        fail(ErrorCode::ZeroVariance,
             "long-run variance estimate is nonpositive and flooring is disabled");
      }
      const double beta = num / denom_;
      stat = scale_ * beta / (std::sqrt(12.0) * std::sqrt(tau2));
    }
    if (floored_out != nullptr) *floored_out = floored;
    return stat;
  }

 private:
  const Series& series_;
  bool studentize_;
  int bandwidth_;
  double floor_;
  Eigen::VectorXd weights_;
  double denom_ = 0.0;
  double scale_ = 0.0;
  double vbar_ = 0.0;
  mutable std::vector<Eigen::VectorXd> scratch_;
};

std::vector<int> identity_permutation(Eigen::Index n) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  return perm;
}

double biased_sd(const Eigen::VectorXd& v) {
  return std::sqrt((v.array() - v.mean()).square().sum() / static_cast<double>(v.size()));
}

}  // namespace

const char* to_string(Method method) noexcept {
  switch (method) {
    case Method::PermRegStud: return "perm-reg-stud";
    case Method::PermRegUnstud: return "perm-reg-unstud";
    case Method::ClassicalWald: return "classical-wald";
    case Method::PermTrendStud: return "perm-trend-stud";
    case Method::PermTrendUnstud: return "perm-trend-unstud";
    case Method::PermLjungBox: return "perm-ljung-box";
    case Method::PermCrossCorr: return "perm-cross-corr";
  }
  return "unknown";
}

TestOutcome regression_perm_test(const Dataset& data, const TestConfig& cfg) {
  validate_config(cfg);
  const Eigen::Index n = data.n();
  const double floor = cfg.floor.value_or(kDefaultRegressionFloor);
  const int bandwidth = cfg.studentize ? resolve_bandwidth(cfg, n) : 0;

  RegressionEngine engine(data, cfg, bandwidth, floor, cfg.threads);
  const PermutationPlan plan =
      draw_plan(static_cast<int>(n), cfg.permutations, cfg.seed, cfg.mode, true);

  PermDistribution dist;
  dist.includes_identity = plan.include_identity;
  detail::run_permutations(
      plan, cfg.threads,
      [&](int, std::span<const int> perm, int slot) { return engine.eval(perm, slot); },
      dist.samples);

  TestOutcome outcome;
  const std::vector<int> identity = identity_permutation(n);
  dist.observed = engine.eval(identity, 0, &outcome.floored);

  outcome.method = cfg.studentize ? Method::PermRegStud : Method::PermRegUnstud;
  outcome.statistic = dist.observed;
  outcome.p_value = p_value(dist, Tail::Upper);
  outcome.alpha = cfg.alpha;
  outcome.reject = outcome.p_value <= cfg.alpha;
  outcome.n = n;
  outcome.p = data.p();
  if (cfg.studentize) outcome.bandwidth_used = bandwidth;
  if (cfg.keep_samples) outcome.perm_samples = std::move(dist.samples);
  return outcome;
}

TestOutcome classical_wald_test(const Dataset& data, double alpha, bool as_printed) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    fail(ErrorCode::InvalidConfig, "alpha must lie in (0, 1)");
  }
  const OlsFit fit = ols_fit(data, /*floor=*/0.0);
  if (fit.sigma_y2 <= 0.0) {
    fail(ErrorCode::ZeroVariance, "response variance is zero");
  }
  const double nd = static_cast<double>(data.n());
  double quad;
  if (as_printed) {
    quad = fit.beta.dot(detail::spectral_inverse(fit.sigma_x, 0.0) * fit.beta);
  } else {
    quad = fit.beta.dot(fit.sigma_x * fit.beta);
  }
  TestOutcome outcome;
  outcome.method = Method::ClassicalWald;
  outcome.statistic = nd / fit.sigma_y2 * quad;
  outcome.alpha = alpha;
  outcome.p_value = 1.0 - chi_squared_cdf(static_cast<int>(data.p()), outcome.statistic);
  outcome.reject =
      outcome.statistic > chi_squared_quantile(static_cast<int>(data.p()), 1.0 - alpha);
  outcome.n = data.n();
  outcome.p = data.p();
  return outcome;
}

TestOutcome trend_perm_test(const Series& series, const TestConfig& cfg) {
  validate_config(cfg);
  const Eigen::Index n = series.n();
  const double variance = (series.values().array() - series.values().mean()).square().sum() /
                          static_cast<double>(n);
  if (!cfg.studentize && variance <= 0.0) {
    fail(ErrorCode::ZeroVariance, "series is constant; the unstudentized statistic is degenerate");
  }
  const double floor = cfg.floor.value_or(kDefaultTrendFloor);
  const int bandwidth = cfg.studentize ? resolve_bandwidth(cfg, n) : 0;

  TrendEngine engine(series, cfg.studentize, bandwidth, floor, cfg.threads);
  const PermutationPlan plan =
      draw_plan(static_cast<int>(n), cfg.permutations, cfg.seed, cfg.mode, true);

  PermDistribution dist;
  dist.includes_identity = plan.include_identity;
  detail::run_permutations(
      plan, cfg.threads,
      [&](int, std::span<const int> perm, int slot) { return engine.eval(perm, slot); },
      dist.samples);

  TestOutcome outcome;
  const std::vector<int> identity = identity_permutation(n);
  dist.observed = engine.eval(identity, 0, &outcome.floored);

  outcome.method = cfg.studentize ? Method::PermTrendStud : Method::PermTrendUnstud;
  outcome.statistic = dist.observed;
  outcome.p_value = p_value(dist, cfg.tail);
  outcome.alpha = cfg.alpha;
  outcome.reject = outcome.p_value <= cfg.alpha;
  outcome.n = n;
  outcome.p = 1;
  if (cfg.studentize) outcome.bandwidth_used = bandwidth;
  if (cfg.keep_samples) outcome.perm_samples = std::move(dist.samples);
  return outcome;
}

TestOutcome ljung_box_perm_test(const Series& series, int lags, const TestConfig& cfg) {
  if (lags < 1) fail(ErrorCode::InvalidConfig, "lag order must be at least 1");
  const Eigen::Index total = series.n();
  const Eigen::Index rows = total - lags;
  if (rows <= lags + 2) {
    fail(ErrorCode::TooFewRows, "series of length " + std::to_string(total) +
                                    " is too short for a lag-" + std::to_string(lags) +
                                    " autocorrelation design");
  }
  const int bandwidth = cfg.bandwidth ? *cfg.bandwidth : default_bandwidth(rows);
  if (total <= lags + 2 + bandwidth) {
    fail(ErrorCode::TooFewRows, "need n > lags + 2 + bandwidth; got n = " +
                                    std::to_string(total) + ", lags = " + std::to_string(lags) +
                                    ", bandwidth = " + std::to_string(bandwidth));
  }
  const double sd = biased_sd(series.values());
  if (sd <= 0.0) {
    fail(ErrorCode::SingularCovariance, "series is constant; lagged design is degenerate");
  }

  // y_i = t_{i+p} / sd, x_{i,j} = t_{i+p-j} / sd; the scale is frozen across
  // permutations so the statistic vector estimates the joint autocorrelations.
  Eigen::VectorXd y(rows);
  Eigen::MatrixXd x(rows, lags);
  for (Eigen::Index i = 0; i < rows; ++i) {
    y[i] = series.values()[i + lags] / sd;
    for (int j = 1; j <= lags; ++j) {
      x(i, j - 1) = series.values()[i + lags - j] / sd;
    }
  }

  TestConfig sub = cfg;
  sub.studentize = true;
  sub.region = Region::Sphere;
  TestOutcome outcome = regression_perm_test(Dataset(std::move(y), std::move(x)), sub);
  outcome.method = Method::PermLjungBox;
  return outcome;
}

TestOutcome cross_correlation_perm_test(const Dataset& data, std::span<const int> lags,
                                        const TestConfig& cfg) {
  std::vector<int> lag_list(lags.begin(), lags.end());
  if (lag_list.empty()) lag_list.push_back(0);
  int max_lag = 0;
  for (int lag : lag_list) {
    if (lag < 0) fail(ErrorCode::InvalidConfig, "lags must be nonnegative");
    max_lag = std::max(max_lag, lag);
  }
  const Eigen::Index rows = data.n() - max_lag;
  const Eigen::Index cols = data.p() * static_cast<Eigen::Index>(lag_list.size());
  if (rows <= cols + 2) {
    fail(ErrorCode::TooFewRows, "need max(lags) + columns + 2 < n");
  }

  const double sd_y = biased_sd(data.y());
  if (sd_y <= 0.0) {
    fail(ErrorCode::ZeroVariance, "response variance is zero");
  }
  Eigen::VectorXd col_sd(data.p());
  for (Eigen::Index j = 0; j < data.p(); ++j) {
    col_sd[j] = biased_sd(data.x().col(j));
    if (col_sd[j] <= 0.0) {
      fail(ErrorCode::SingularCovariance,
           "covariate column " + std::to_string(j + 1) + " is constant");
    }
  }

  // Column block (r, j): x_{i+r, j} / sd_j, pairing y_i with the r-step lead.
  Eigen::VectorXd y = data.y().head(rows) / sd_y;
  Eigen::MatrixXd x(rows, cols);
  Eigen::Index col = 0;
  for (int lag : lag_list) {
    for (Eigen::Index j = 0; j < data.p(); ++j, ++col) {
      x.col(col) = data.x().col(j).segment(lag, rows) / col_sd[j];
    }
  }

  TestConfig sub = cfg;
  sub.studentize = true;
  sub.region = Region::Sphere;
  TestOutcome outcome = regression_perm_test(Dataset(std::move(y), std::move(x)), sub);
  outcome.method = Method::PermCrossCorr;
  return outcome;
}

double theoretical_local_power(double h, double rho, double alpha) {
  const double shift = h * (1.0 - rho) * (1.0 - rho) / std::sqrt(12.0);
  return 1.0 - normal_cdf(normal_quantile(1.0 - alpha) - shift);
}

double theoretical_local_power_nu(double nu, double tau, double alpha) {
  const double shift = nu * std::sqrt(12.0) / tau;
  return 1.0 - normal_cdf(normal_quantile(1.0 - alpha) - shift);
}

double chi_squared_quantile(int dof, double prob) {
  return boost::math::quantile(boost::math::chi_squared(dof), prob);
}

double chi_squared_cdf(int dof, double x) {
  if (x <= 0.0) return 0.0;
  return boost::math::cdf(boost::math::chi_squared(dof), x);
}

double normal_quantile(double prob) {
  return boost::math::quantile(boost::math::normal(), prob);
}

double normal_cdf(double x) { return boost::math::cdf(boost::math::normal(), x); }

}  // namespace tspt
