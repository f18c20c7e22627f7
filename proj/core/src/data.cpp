#include "tspt/data.hpp"

#include <string>

namespace tspt {

Dataset::Dataset(Eigen::VectorXd y, Eigen::MatrixXd x) : y_(std::move(y)), x_(std::move(x)) {
  if (y_.size() != x_.rows()) {
    fail(ErrorCode::DimensionMismatch, "response has " + std::to_string(y_.size()) +
                                           " rows but covariate matrix has " +
                                           std::to_string(x_.rows()));
  }
  if (x_.cols() < 1) {
    fail(ErrorCode::DimensionMismatch, "covariate matrix must have at least one column");
  }
  if (!y_.allFinite() || !x_.allFinite()) {
    fail(ErrorCode::NonFiniteValue, "dataset contains NaN or infinite entries");
  }
  if (y_.size() <= x_.cols() + 2) {
    fail(ErrorCode::TooFewRows, "need n > p + 2 rows to fit and studentize; got n = " +
                                    std::to_string(y_.size()) + ", p = " +
                                    std::to_string(x_.cols()));
  }
}

Series::Series(Eigen::VectorXd values) : values_(std::move(values)) {
  if (values_.size() < 3) {
    fail(ErrorCode::TooFewRows,
         "series needs at least 3 observations; got " + std::to_string(values_.size()));
  }
  if (!values_.allFinite()) {
    fail(ErrorCode::NonFiniteValue, "series contains NaN or infinite entries");
  }
}

void validate_config(const TestConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    fail(ErrorCode::InvalidConfig, "alpha must lie in (0, 1)");
  }
  if (cfg.permutations < 1) {
    fail(ErrorCode::InvalidConfig, "permutation count must be at least 1");
  }
  if (cfg.bandwidth && *cfg.bandwidth < 1) {
    fail(ErrorCode::InvalidConfig, "bandwidth must be a positive integer");
  }
  if (cfg.floor && *cfg.floor < 0.0) {
    fail(ErrorCode::InvalidConfig, "eigenvalue floor must be nonnegative");
  }
  if (cfg.threads < 1) {
    fail(ErrorCode::InvalidConfig, "thread count must be at least 1");
  }
}

}  // namespace tspt
