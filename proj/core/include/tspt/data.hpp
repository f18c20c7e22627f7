#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "tspt/error.hpp"

namespace tspt {

/// Response vector paired with a covariate matrix; the unit acted on by the
/// permutation tests. Immutable after construction: permuting produces a new
/// Dataset, so instances are safe to share across threads.
class Dataset {
 public:
  /// Validates shape and finiteness; throws DIMENSION_MISMATCH,
  /// NON_FINITE_VALUE, or TOO_FEW_ROWS (requires n > p + 2).
  Dataset(Eigen::VectorXd y, Eigen::MatrixXd x);

  const Eigen::VectorXd& y() const noexcept { return y_; }
  const Eigen::MatrixXd& x() const noexcept { return x_; }
  Eigen::Index n() const noexcept { return y_.size(); }
  Eigen::Index p() const noexcept { return x_.cols(); }

 private:
  Eigen::VectorXd y_;
  Eigen::MatrixXd x_;
};

inline Dataset validate_dataset(Eigen::VectorXd y, Eigen::MatrixXd x) {
  return Dataset(std::move(y), std::move(x));
}

/// A univariate series tested for monotone trend. n >= 3, finite entries.
/// Zero sample variance is allowed at construction; consumers that cannot
/// handle it reject it themselves (ZERO_VARIANCE).
class Series {
 public:
  explicit Series(Eigen::VectorXd values);

  const Eigen::VectorXd& values() const noexcept { return values_; }
  Eigen::Index n() const noexcept { return values_.size(); }

 private:
  Eigen::VectorXd values_;
};

inline Series validate_series(Eigen::VectorXd values) { return Series(std::move(values)); }

enum class Region { Sphere, Box };
enum class Tail { Upper, TwoSided };
enum class SampleMode { Sampled, Exhaustive };

inline constexpr double kDefaultRegressionFloor = 1e-4;
inline constexpr double kDefaultTrendFloor = 1e-6;
inline constexpr int kDefaultPermutations = 2000;

/// Knobs shared by all permutation test procedures. `bandwidth` empty means
/// the floor(n^(1/3)) + 1 rule; `floor` empty means the per-family default
/// (1e-4 for regression-type tests, 1e-6 for the trend test) and an explicit
/// 0 disables eigenvalue flooring entirely.
struct TestConfig {
  double alpha = 0.05;
  int permutations = kDefaultPermutations;
  std::uint64_t seed = 0;
  std::optional<int> bandwidth{};
  std::optional<double> floor{};
  Region region = Region::Sphere;
  bool studentize = true;
  Tail tail = Tail::Upper;
  SampleMode mode = SampleMode::Sampled;
  bool keep_samples = false;
  int threads = 1;
};

/// Throws INVALID_CONFIG when a field is out of range.
void validate_config(const TestConfig& cfg);

}  // namespace tspt
