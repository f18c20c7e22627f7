#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tspt/data.hpp"
#include "tspt/permutation.hpp"

namespace tspt {

enum class Method {
  PermRegStud,
  PermRegUnstud,
  ClassicalWald,
  PermTrendStud,
  PermTrendUnstud,
  PermLjungBox,
  PermCrossCorr,
};

const char* to_string(Method method) noexcept;

struct TestOutcome {
  Method method{};
  double statistic = 0.0;
  double p_value = 1.0;
  bool reject = false;
  double alpha = 0.05;
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  std::optional<int> bandwidth_used{};
  bool floored = false;  // any eigenvalue floor bound while computing the observed statistic
  std::optional<std::vector<double>> perm_samples{};
};

/// Permutation test of "regression coefficient is zero". With studentize the
/// statistic is the quadratic form n b' S G^{-1} S b (Sphere) or the max
/// coordinate of |G^{-1/2} S sqrt(n) b| (Box), with the long-run covariance G
/// recomputed on every permuted arrangement; without studentize G is replaced
/// by sigma_y^2 S, which is permutation invariant. The p-value is upper-tail;
/// cfg.tail is ignored (the statistics reject for large values by shape).
TestOutcome regression_perm_test(const Dataset& data, const TestConfig& cfg);

/// Wald chi-squared baseline: (n / sigma_y^2) b' S b against the upper-alpha
/// chi-squared quantile with p degrees of freedom. `as_printed` switches to
/// the S^{-1} inner matrix for fidelity experiments; that variant is only
/// chi-squared calibrated when S is the identity.
TestOutcome classical_wald_test(const Dataset& data, double alpha, bool as_printed = false);

/// Permutation test of "no monotone trend" on a series, permuting the series
/// values. Studentized statistic n^{3/2} beta / (sqrt(12) tau); unstudentized
/// statistic is T_n alone. Upper tail targets increasing alternatives.
TestOutcome trend_perm_test(const Series& series, const TestConfig& cfg);

/// Quadratic-form permutation test of "first `lags` autocorrelations are all
/// zero", built by regressing the standardized series on its own lags and
/// reusing the studentized regression machinery. The standardization constant
/// is computed once on the full series and held fixed across permutations.
TestOutcome ljung_box_perm_test(const Series& series, int lags, const TestConfig& cfg);

/// Quadratic-form permutation test of "all (lagged) cross-correlations are
/// zero". Columns are standardized by their full-sample standard deviations
/// (held fixed across permutations); lag r pairs y_i with x_{i+r, j}.
TestOutcome cross_correlation_perm_test(const Dataset& data, std::span<const int> lags,
                                        const TestConfig& cfg);

/// Limiting power of the one-sided studentized trend test against the local
/// AR(1) alternative with slope h: 1 - Phi(z_{1-alpha} - h (1-rho)^2 / sqrt(12)).
double theoretical_local_power(double h, double rho, double alpha);

/// General form 1 - Phi(z_{1-alpha} - nu sqrt(12) / tau).
double theoretical_local_power_nu(double nu, double tau, double alpha);

double chi_squared_quantile(int dof, double prob);
double chi_squared_cdf(int dof, double x);
double normal_quantile(double prob);
double normal_cdf(double x);

}  // namespace tspt
