#include "tspt/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tspt {

namespace {

constexpr double kSingularRelTol = 1e-12;

struct SpectralDecomposition {
  Eigen::MatrixXd u;
  Eigen::VectorXd lambda;
};

SpectralDecomposition sym_eig(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::SingularCovariance, "symmetric eigendecomposition failed to converge");
  }
  return {solver.eigenvectors(), solver.eigenvalues()};
}

enum class SpectralFn { Inverse, InverseSqrt, Sqrt };

Eigen::MatrixXd spectral_transform(const Eigen::MatrixXd& m, double floor, SpectralFn fn,
                                   bool* floored) {
  SpectralDecomposition eig = sym_eig(m);
  bool clipped = false;
  if (floor > 0.0) {
    for (Eigen::Index i = 0; i < eig.lambda.size(); ++i) {
      if (eig.lambda[i] < floor) {
        eig.lambda[i] = floor;
        clipped = true;
      }
    }
  } else {
    const double lambda_max = eig.lambda.cwiseAbs().maxCoeff();
    const double threshold = kSingularRelTol * std::max(lambda_max, 1e-300);
    // An inverse only needs the spectrum bounded away from zero; square roots
    // additionally need it positive.
    const double guard =
        fn == SpectralFn::Inverse ? eig.lambda.cwiseAbs().minCoeff() : eig.lambda.minCoeff();
    if (guard <= threshold) {
      fail(ErrorCode::SingularCovariance,
           "matrix spectrum reaches " + std::to_string(eig.lambda.minCoeff()) +
               " and flooring is disabled");
    }
  }
  if (floored != nullptr) *floored = clipped;
  Eigen::VectorXd transformed(eig.lambda.size());
  for (Eigen::Index i = 0; i < eig.lambda.size(); ++i) {
    switch (fn) {
      case SpectralFn::Inverse: transformed[i] = 1.0 / eig.lambda[i]; break;
      case SpectralFn::InverseSqrt: transformed[i] = 1.0 / std::sqrt(eig.lambda[i]); break;
      case SpectralFn::Sqrt: transformed[i] = std::sqrt(eig.lambda[i]); break;
    }
  }
  return eig.u * transformed.asDiagonal() * eig.u.transpose();
}

}  // namespace

namespace detail {

Eigen::MatrixXd hac_raw_from_products(const Eigen::MatrixXd& w, int bandwidth) {
  const Eigen::Index n = w.rows();
  const Eigen::MatrixXd wc = w.rowwise() - w.colwise().mean();
  Eigen::MatrixXd gamma = (wc.transpose() * wc) / static_cast<double>(n);
  Eigen::MatrixXd tau = Eigen::MatrixXd::Zero(w.cols(), w.cols());
  for (int k = 1; k <= bandwidth; ++k) {
    const Eigen::Index len = std::min<Eigen::Index>(n - k, n - bandwidth);
    tau.noalias() += wc.topRows(len).transpose() * wc.middleRows(k, len);
  }
  tau *= 2.0 / static_cast<double>(n);
  return gamma + tau;
}

double trend_tau2_raw(const Eigen::VectorXd& values, int bandwidth) {
  const Eigen::Index n = values.size();
  const Eigen::VectorXd vc = values.array() - values.mean();
  double acc = vc.squaredNorm() / static_cast<double>(n);
  double cross = 0.0;
  for (int i = 1; i <= bandwidth; ++i) {
    cross += vc.head(n - i).dot(vc.tail(n - i));
  }
  return acc + 2.0 * cross / static_cast<double>(n);
}

FlooredMatrix symmetrize_and_floor(const Eigen::MatrixXd& raw, double floor) {
  const Eigen::MatrixXd sym = 0.5 * (raw + raw.transpose());
  if (floor <= 0.0) return {sym, false};
  SpectralDecomposition eig = sym_eig(sym);
  bool clipped = false;
  for (Eigen::Index i = 0; i < eig.lambda.size(); ++i) {
    if (eig.lambda[i] < floor) {
      eig.lambda[i] = floor;
      clipped = true;
    }
  }
  if (!clipped) return {sym, false};
  return {eig.u * eig.lambda.asDiagonal() * eig.u.transpose(), true};
}

Eigen::MatrixXd spectral_inverse(const Eigen::MatrixXd& m, double floor, bool* floored) {
  return spectral_transform(m, floor, SpectralFn::Inverse, floored);
}

Eigen::MatrixXd spectral_inverse_sqrt(const Eigen::MatrixXd& m, double floor, bool* floored) {
  return spectral_transform(m, floor, SpectralFn::InverseSqrt, floored);
}

Eigen::MatrixXd spectral_sqrt(const Eigen::MatrixXd& m, double floor, bool* floored) {
  return spectral_transform(m, floor, SpectralFn::Sqrt, floored);
}

Eigen::MatrixXd svd_truncated_inverse(const Eigen::MatrixXd& m, double floor, bool* truncated) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::VectorXd sigma = svd.singularValues();
  bool clipped = false;
  if (floor > 0.0) {
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
      if (sigma[i] < floor) {
        sigma[i] = floor;
        clipped = true;
      }
    }
  } else {
    const double sigma_max = std::max(sigma.maxCoeff(), 1e-300);
    if (sigma.minCoeff() <= kSingularRelTol * sigma_max) {
      fail(ErrorCode::SingularCovariance,
           "matrix is numerically singular and truncation is disabled");
    }
  }
  if (truncated != nullptr) *truncated = clipped;
  return svd.matrixV() * sigma.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
}

}  // namespace detail

OlsFit ols_fit(const Dataset& data, double floor) {
  const Eigen::Index n = data.n();
  OlsFit fit;
  fit.x_mean = data.x().colwise().mean();
  fit.y_mean = data.y().mean();

  const Eigen::MatrixXd xc = data.x().rowwise() - fit.x_mean.transpose();
  const Eigen::VectorXd yc = data.y().array() - fit.y_mean;

  fit.sigma_x = (xc.transpose() * xc) / static_cast<double>(n);
  fit.sigma_y2 = yc.squaredNorm() / static_cast<double>(n);

  const Eigen::VectorXd cross = (xc.transpose() * yc) / static_cast<double>(n);
  const Eigen::MatrixXd sigma_inv = detail::spectral_inverse(fit.sigma_x, floor, &fit.sigma_floored);
  fit.beta = sigma_inv * cross;
  fit.residuals = data.y() - data.x() * fit.beta;
  return fit;
}

int default_bandwidth(Eigen::Index n) {
  if (n < 2) {
    fail(ErrorCode::InvalidConfig, "bandwidth rule needs n >= 2");
  }
  auto root = static_cast<Eigen::Index>(std::cbrt(static_cast<double>(n)));
  while (root > 1 && root * root * root > n) --root;
  while ((root + 1) * (root + 1) * (root + 1) <= n) ++root;
  return static_cast<int>(root) + 1;
}

LongRunCov hac_gamma(const Dataset& data, const OlsFit& fit, int bandwidth, double floor) {
  const Eigen::Index n = data.n();
  if (bandwidth < 1 || bandwidth >= n) {
    fail(ErrorCode::BandwidthTooLarge, "bandwidth " + std::to_string(bandwidth) +
                                           " must satisfy 1 <= b < n = " + std::to_string(n));
  }
  const Eigen::MatrixXd w = data.x().array().colwise() * fit.residuals.array();
  LongRunCov cov;
  cov.raw = detail::hac_raw_from_products(w, bandwidth);
  auto conditioned = detail::symmetrize_and_floor(cov.raw, floor);
  cov.matrix = std::move(conditioned.matrix);
  cov.floored = conditioned.floored;
  cov.bandwidth = bandwidth;
  cov.floor = floor;
  return cov;
}

Eigen::MatrixXd psd_inverse_sqrt(const Eigen::MatrixXd& m, double floor) {
  if (m.rows() != m.cols()) {
    fail(ErrorCode::DimensionMismatch, "matrix must be square");
  }
  if (!(floor > 0.0)) {
    fail(ErrorCode::InvalidConfig, "floor must be positive");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asymmetry = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asymmetry > 1e-8 * scale) {
    fail(ErrorCode::NotSymmetric,
         "matrix asymmetry " + std::to_string(asymmetry) + " exceeds tolerance");
  }
  return detail::spectral_inverse_sqrt(m, floor);
}

TrendFit trend_fit(const Series& series) {
  const Eigen::Index n = series.n();
  const double nd = static_cast<double>(n);
  const double center = (nd + 1.0) / 2.0;
  const double vbar = series.values().mean();
  double num = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    num += (static_cast<double>(i + 1) - center) * (series.values()[i] - vbar);
  }
  const double denom = nd * (nd * nd - 1.0) / 12.0;
  TrendFit fit;
  fit.n = n;
  fit.beta = num / denom;
  fit.t_stat = num / (nd * std::sqrt(nd));
  return fit;
}

LongRunCov trend_tau2(const Series& series, int bandwidth, double floor) {
  const Eigen::Index n = series.n();
  if (bandwidth < 1 || bandwidth >= n) {
    fail(ErrorCode::BandwidthTooLarge, "bandwidth " + std::to_string(bandwidth) +
                                           " must satisfy 1 <= b < n = " + std::to_string(n));
  }
  const double raw = detail::trend_tau2_raw(series.values(), bandwidth);
  LongRunCov cov;
  cov.raw = Eigen::MatrixXd::Constant(1, 1, raw);
  cov.bandwidth = bandwidth;
  cov.floor = floor;
  cov.floored = floor > 0.0 && raw < floor;
  cov.matrix = Eigen::MatrixXd::Constant(1, 1, cov.floored ? floor : raw);
  return cov;
}

}  // namespace tspt
