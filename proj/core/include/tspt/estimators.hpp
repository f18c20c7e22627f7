#pragma once

#include <Eigen/Dense>

#include "tspt/data.hpp"

namespace tspt {

/// Centered least squares fit of y on x. All second moments use the biased
/// 1/n convention. Residuals are y_i - x_i . beta with no intercept term, so
/// they carry the mean offset; downstream long-run variance sums center the
/// covariate-residual products themselves.
struct OlsFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd sigma_x;   // (1/n) sum (x_i - xbar)(x_i - xbar)'
  double sigma_y2 = 0.0;     // (1/n) sum (y_i - ybar)^2
  Eigen::VectorXd x_mean;
  double y_mean = 0.0;
  bool sigma_floored = false;
};

/// floor == 0 disables eigenvalue clipping of sigma_x, in which case a
/// numerically singular covariate covariance throws SINGULAR_COVARIANCE.
OlsFit ols_fit(const Dataset& data, double floor = 0.0);

/// Bandwidth rule floor(n^(1/3)) + 1, computed with exact integer cube roots.
int default_bandwidth(Eigen::Index n);

/// Bandwidth-truncated long-run covariance estimate. `raw` is the plain
/// gamma + tau double sum; `matrix` is raw symmetrized to (G + G')/2 with its
/// eigenvalues clipped from below at `floor`.
struct LongRunCov {
  Eigen::MatrixXd matrix;
  Eigen::MatrixXd raw;
  int bandwidth = 0;
  double floor = 0.0;
  bool floored = false;

  double scalar() const { return matrix(0, 0); }
  double raw_scalar() const { return raw(0, 0); }
};

/// Long-run covariance of the covariate-residual products x_i * eps_i:
///   gamma_ij = (1/n) sum_l (w_li - wbar_i)(w_lj - wbar_j)
///   tau_ij   = (2/n) sum_{k=1}^{b} sum_{l=1}^{min(n-k, n-b)} (w_li - wbar_i)(w_{l+k,j} - wbar_j)
/// with w_li = x_li * eps_l. Requires 1 <= bandwidth < n.
LongRunCov hac_gamma(const Dataset& data, const OlsFit& fit, int bandwidth, double floor);

/// Spectral inverse square root with eigenvalues clipped at `floor` (> 0).
/// Throws NOT_SYMMETRIC when the input is asymmetric beyond 1e-8 * scale.
Eigen::MatrixXd psd_inverse_sqrt(const Eigen::MatrixXd& m, double floor);

/// Least squares regression of a series on its index 1..n.
struct TrendFit {
  double beta = 0.0;    // slope
  double t_stat = 0.0;  // n^(-3/2) sum (i - (n+1)/2)(v_i - vbar)
  Eigen::Index n = 0;
};

TrendFit trend_fit(const Series& series);

/// Scalar long-run variance of a series:
///   (1/n) sum (v_i - vbar)^2 + (2/n) sum_{i=1}^{b} sum_{j=1}^{n-i} (v_j - vbar)(v_{j+i} - vbar)
/// floored at `floor`. Requires 1 <= bandwidth < n.
LongRunCov trend_tau2(const Series& series, int bandwidth, double floor);

namespace detail {

/// Raw gamma + tau double sums on an already-formed product matrix w (n x p).
Eigen::MatrixXd hac_raw_from_products(const Eigen::MatrixXd& w, int bandwidth);

/// Raw trend long-run variance on a value vector.
double trend_tau2_raw(const Eigen::VectorXd& values, int bandwidth);

struct FlooredMatrix {
  Eigen::MatrixXd matrix;
  bool floored = false;
};

/// (m + m')/2 followed by eigenvalue clipping at `floor` (no clip if floor <= 0).
FlooredMatrix symmetrize_and_floor(const Eigen::MatrixXd& raw, double floor);

/// Spectral f(lambda) transforms of a symmetric matrix. floor > 0 clips the
/// spectrum first; floor == 0 instead rejects near-singular spectra with
/// SINGULAR_COVARIANCE. `floored` (optional out) records whether a clip bound.
Eigen::MatrixXd spectral_inverse(const Eigen::MatrixXd& m, double floor, bool* floored = nullptr);
Eigen::MatrixXd spectral_inverse_sqrt(const Eigen::MatrixXd& m, double floor,
                                      bool* floored = nullptr);
Eigen::MatrixXd spectral_sqrt(const Eigen::MatrixXd& m, double floor, bool* floored = nullptr);

/// Inverse of a (possibly asymmetric) square matrix through its SVD with
/// singular values truncated from below at `floor`; floor == 0 instead
/// rejects near-singular inputs. This is the conditioning route the sphere
/// statistic uses on the raw long-run covariance: the skew part of the
/// estimation noise inflates singular values, so the truncated SVD inverse
/// stays tame where a symmetrize-then-floor inverse blows up.
Eigen::MatrixXd svd_truncated_inverse(const Eigen::MatrixXd& m, double floor,
                                      bool* truncated = nullptr);

}  // namespace detail

}  // namespace tspt
