#include "tspt/permutation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "tspt/rng.hpp"

namespace tspt {

namespace detail {

bool is_bijection(std::span<const int> perm, Eigen::Index n) {
  if (std::cmp_not_equal(perm.size(), n)) return false;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int v : perm) {
    if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = true;
  }
  return true;
}

void run_permutations(const PermutationPlan& plan, int threads,
                      const std::function<double(int, std::span<const int>, int)>& fn,
                      std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(plan.count), 0.0);
  const int workers = std::max(1, std::min(threads, plan.count));

  std::mutex error_mutex;
  std::optional<Error> first_error;
  std::atomic<bool> failed{false};

  auto run_range = [&](int begin, int end, int slot) {
    for (int k = begin; k < end; ++k) {
      if (failed.load(std::memory_order_relaxed)) return;
      try {
        out[static_cast<std::size_t>(k)] = fn(k, plan.perm(k), slot);
      } catch (const Error& e) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) {
          first_error.emplace(
              Error::with_context(e, "at permutation index " + std::to_string(k)));
        }
        failed.store(true, std::memory_order_relaxed);
        return;
      } catch (const std::exception& e) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) {
          first_error.emplace(ErrorCode::InvalidConfig,
                              std::string(e.what()) + " (at permutation index " +
                                  std::to_string(k) + ")");
        }
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  if (workers == 1) {
    run_range(0, plan.count, 0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
      const int begin = static_cast<int>(static_cast<long long>(plan.count) * t / workers);
      const int end = static_cast<int>(static_cast<long long>(plan.count) * (t + 1) / workers);
      pool.emplace_back(run_range, begin, end, t);
    }
    for (auto& th : pool) th.join();
  }

  if (first_error) throw *first_error;
}

}  // namespace detail

PermutationPlan draw_plan(int n, int count, std::uint64_t seed, SampleMode mode,
                          bool include_identity) {
  if (n < 1) fail(ErrorCode::InvalidConfig, "permutation plan needs n >= 1");
  if (count < 1 && mode == SampleMode::Sampled) {
    fail(ErrorCode::InvalidConfig, "permutation count must be at least 1");
  }

  PermutationPlan plan;
  plan.n = n;
  plan.seed = seed;
  plan.mode = mode;
  plan.include_identity = include_identity;

  if (mode == SampleMode::Exhaustive) {
    if (n > kMaxExhaustiveN) {
      fail(ErrorCode::ExhaustiveTooLarge,
           "exhaustive enumeration supports n <= " + std::to_string(kMaxExhaustiveN) +
               "; got n = " + std::to_string(n));
    }
    int factorial = 1;
    for (int i = 2; i <= n; ++i) factorial *= i;
    plan.count = factorial;
    plan.include_identity = true;  // lexicographic order starts at the identity
    plan.flat.reserve(static_cast<std::size_t>(factorial) * n);
    std::vector<int> current(static_cast<std::size_t>(n));
    std::iota(current.begin(), current.end(), 0);
    do {
      plan.flat.insert(plan.flat.end(), current.begin(), current.end());
    } while (std::next_permutation(current.begin(), current.end()));
    return plan;
  }

  plan.count = count;
  plan.flat.resize(static_cast<std::size_t>(count) * n);
  Rng rng(seed, /*stream=*/0x7065726Dull);  // permutation stream tag
  const int random_draws = include_identity ? count - 1 : count;
  std::vector<int> scratch(static_cast<std::size_t>(n));
  for (int k = 0; k < random_draws; ++k) {
    std::iota(scratch.begin(), scratch.end(), 0);
    rng.shuffle(scratch);
    std::copy(scratch.begin(), scratch.end(), plan.flat.begin() + static_cast<std::size_t>(k) * n);
  }
  if (include_identity) {
    auto last = plan.flat.begin() + static_cast<std::size_t>(count - 1) * n;
    std::iota(last, last + n, 0);
  }
  return plan;
}

std::vector<std::vector<int>> enumerate_permutations(int n) {
  if (n < 1) fail(ErrorCode::InvalidConfig, "enumeration needs n >= 1");
  if (n > kMaxExhaustiveN) {
    fail(ErrorCode::ExhaustiveTooLarge,
         "exhaustive enumeration supports n <= " + std::to_string(kMaxExhaustiveN) +
             "; got n = " + std::to_string(n));
  }
  std::vector<std::vector<int>> result;
  std::vector<int> current(static_cast<std::size_t>(n));
  std::iota(current.begin(), current.end(), 0);
  do {
    result.push_back(current);
  } while (std::next_permutation(current.begin(), current.end()));
  return result;
}

Dataset permute_covariates(const Dataset& data, std::span<const int> perm) {
  if (!detail::is_bijection(perm, data.n())) {
    fail(ErrorCode::InvalidPermutation, "permutation is not a bijection of [n]");
  }
  Eigen::MatrixXd permuted(data.n(), data.p());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    permuted.row(i) = data.x().row(perm[static_cast<std::size_t>(i)]);
  }
  return Dataset(data.y(), std::move(permuted));
}

Series permute_series(const Series& series, std::span<const int> perm) {
  if (!detail::is_bijection(perm, series.n())) {
    fail(ErrorCode::InvalidPermutation, "permutation is not a bijection of [n]");
  }
  Eigen::VectorXd permuted(series.n());
  for (Eigen::Index i = 0; i < series.n(); ++i) {
    permuted[i] = series.values()[perm[static_cast<std::size_t>(i)]];
  }
  return Series(std::move(permuted));
}

PermDistribution perm_distribution(const Dataset& data,
                                   const std::function<double(const Dataset&)>& statistic,
                                   const PermutationPlan& plan, int threads) {
  if (plan.n != data.n()) {
    fail(ErrorCode::DimensionMismatch, "plan is for n = " + std::to_string(plan.n) +
                                           " but dataset has n = " + std::to_string(data.n()));
  }
  PermDistribution dist;
  dist.includes_identity = plan.include_identity;
  detail::run_permutations(
      plan, threads,
      [&](int, std::span<const int> perm, int) { return statistic(permute_covariates(data, perm)); },
      dist.samples);
  dist.observed = statistic(data);
  return dist;
}

PermDistribution perm_distribution(const Series& series,
                                   const std::function<double(const Series&)>& statistic,
                                   const PermutationPlan& plan, int threads) {
  if (plan.n != series.n()) {
    fail(ErrorCode::DimensionMismatch, "plan is for n = " + std::to_string(plan.n) +
                                           " but series has n = " + std::to_string(series.n()));
  }
  PermDistribution dist;
  dist.includes_identity = plan.include_identity;
  detail::run_permutations(
      plan, threads,
      [&](int, std::span<const int> perm, int) { return statistic(permute_series(series, perm)); },
      dist.samples);
  dist.observed = statistic(series);
  return dist;
}

double p_value(const PermDistribution& dist, Tail tail) {
  if (dist.samples.empty()) fail(ErrorCode::EmptyInput, "permutation distribution has no samples");
  const double observed = tail == Tail::TwoSided ? std::abs(dist.observed) : dist.observed;
  std::size_t count = 0;
  for (double s : dist.samples) {
    const double value = tail == Tail::TwoSided ? std::abs(s) : s;
    if (value >= observed) ++count;
  }
  const auto m = static_cast<double>(dist.samples.size());
  return dist.includes_identity ? static_cast<double>(count) / m
                                : (1.0 + static_cast<double>(count)) / (m + 1.0);
}

std::pair<double, double> trend_conditional_moments(const Series& series) {
  const auto n = static_cast<double>(series.n());
  const double centered_ss = (series.values().array() - series.values().mean()).square().sum();
  return {0.0, (n + 1.0) / (12.0 * n * n) * centered_ss};
}

std::pair<double, double> product_conditional_moments(std::span<const double> y,
                                                      std::span<const double> x) {
  if (y.size() != x.size()) {
    fail(ErrorCode::DimensionMismatch, "vectors must have equal length");
  }
  if (y.size() < 2) fail(ErrorCode::TooFewRows, "need at least two observations");
  const auto n = static_cast<double>(y.size());
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    xbar += x[i];
    ybar += y[i];
  }
  xbar /= n;
  ybar /= n;
  double ssx = 0.0, ssy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ssx += (x[i] - xbar) * (x[i] - xbar);
    ssy += (y[i] - ybar) * (y[i] - ybar);
  }
  return {std::sqrt(n) * xbar * ybar, ssx * ssy / (n * (n - 1.0))};
}

}  // namespace tspt
