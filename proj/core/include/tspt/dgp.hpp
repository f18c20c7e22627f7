#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tspt/data.hpp"

namespace tspt {

enum class DgpKind { MdepRegression, Var2, Ar1, MdepSeries, IidGauss };

const char* to_string(DgpKind kind) noexcept;

/// lambda_i = h * i / n^(3/2); the local-alternative drift.
struct LinearTrend {
  double h = 0.0;
};

/// Monotone table on [0, 1], applied as lambda_i = interp(i / n).
struct TabulatedTrend {
  std::vector<double> values;
};

using TrendSpec = std::variant<LinearTrend, TabulatedTrend>;

/// A simulation design; n and seed are supplied at generation time so the same
/// spec can serve as a template across a Monte Carlo grid.
struct DgpSpec {
  DgpKind kind = DgpKind::IidGauss;
  int m = 0;        // dependence parameter of the product designs
  int p = 3;        // covariate dimension of the regression product design
  double rho = 0.0; // autoregressive parameter of var2 / ar1
  std::optional<TrendSpec> trend{};

  bool is_series() const noexcept;
  std::string label() const;
};

void validate_dgp(const DgpSpec& spec);

/// Gaussian product design: t_i = prod_{j=0}^{m-1} xi_{i+j} (empty product is
/// 1), y_i = t_i xi'_{i,p+1}, x_{ij} = t_i xi'_{ij}. m = 0 gives i.i.d.
/// Gaussian response and covariates with y independent of x.
Dataset gen_mdep_regression(int m, int p, int n, std::uint64_t seed);

/// VAR(2) design x_i = R x_{i-2} + eps_i with R = Q diag(rho, rho, -rho) Q',
/// both interleaved chains initialized from the exact stationary law, and
/// response y_i = x_{i+1,1}. p = 3.
Dataset gen_var2(double rho, int n, std::uint64_t seed);

/// Stationary AR(1): x_1 ~ N(0, 1/(1-rho^2)), x_{i+1} = rho x_i + eps_{i+1}.
Series gen_ar1(double rho, int n, std::uint64_t seed);

/// Gaussian product series x_i = prod_{j=0}^{m} z_{i+j} (m + 1 factors):
/// m = 0 is i.i.d.; general m is m-dependent, unit variance, uncorrelated.
Series gen_mdep_series(int m, int n, std::uint64_t seed);

/// i.i.d. standard Gaussian series.
Series gen_iid_gauss(int n, std::uint64_t seed);

/// Adds the trend elementwise. Tabulated trends must be monotone
/// (NON_MONOTONE_TREND otherwise).
Series apply_trend(const Series& series, const TrendSpec& trend);

/// The fixed orthogonal matrix of the VAR(2) design.
Eigen::Matrix3d var2_q();
Eigen::Matrix3d var2_r(double rho);

std::variant<Dataset, Series> generate(const DgpSpec& spec, int n, std::uint64_t seed);

}  // namespace tspt
