#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "tspt/data.hpp"

namespace tspt {

/// Maximum n for exhaustive enumeration (8! = 40320 permutations).
inline constexpr int kMaxExhaustiveN = 8;

/// A fixed, reproducible sequence of permutations of [n]. In Sampled mode the
/// draws are i.i.d. uniform over S_n given the seed; when include_identity is
/// set the final slot holds the identity so that the plan contains `count`
/// permutations of which `count - 1` are random. Exhaustive mode enumerates
/// all n! permutations in lexicographic order.
struct PermutationPlan {
  int n = 0;
  int count = 0;
  std::uint64_t seed = 0;
  SampleMode mode = SampleMode::Sampled;
  bool include_identity = true;
  std::vector<int> flat;  // count rows of length n

  std::span<const int> perm(int k) const {
    return {flat.data() + static_cast<std::size_t>(k) * n, static_cast<std::size_t>(n)};
  }
};

PermutationPlan draw_plan(int n, int count, std::uint64_t seed,
                          SampleMode mode = SampleMode::Sampled, bool include_identity = true);

/// All n! permutations of {0, ..., n-1} in lexicographic order, n <= 8.
std::vector<std::vector<int>> enumerate_permutations(int n);

/// Row-wise permutation of the covariates: row i of the result is row perm[i]
/// of the input. The response is untouched. Throws INVALID_PERMUTATION when
/// perm is not a bijection of [n].
Dataset permute_covariates(const Dataset& data, std::span<const int> perm);

/// Value permutation of a series (the trend tests permute the series itself).
Series permute_series(const Series& series, std::span<const int> perm);

/// Permutation distribution of a scalar statistic: samples[k] is the statistic
/// on the k-th permuted data, observed is the statistic on the identity
/// arrangement. includes_identity records whether one sample slot is the
/// identity arrangement, which fixes the p-value convention.
struct PermDistribution {
  std::vector<double> samples;
  double observed = 0.0;
  bool includes_identity = true;
};

PermDistribution perm_distribution(const Dataset& data,
                                   const std::function<double(const Dataset&)>& statistic,
                                   const PermutationPlan& plan, int threads = 1);

PermDistribution perm_distribution(const Series& series,
                                   const std::function<double(const Series&)>& statistic,
                                   const PermutationPlan& plan, int threads = 1);

/// Add-one smoothed permutation p-value with weak (>=) tie handling:
/// #{samples >= observed} / M when a sample slot holds the identity, and
/// (1 + #{samples >= observed}) / (M + 1) otherwise. TwoSided compares
/// absolute values.
double p_value(const PermDistribution& dist, Tail tail);

/// Exact conditional moments of the trend statistic
///   T = n^(-3/2) sum_i (i - (n+1)/2)(v_{pi(i)} - vbar)
/// under a uniform random permutation: mean 0 and variance
/// ((n+1) / (12 n^2)) * sum_i (v_i - vbar)^2.
std::pair<double, double> trend_conditional_moments(const Series& series);

/// Exact conditional moments of the product statistic
///   T = n^(-1/2) sum_i y_i x_{pi(i)}
/// under a uniform random permutation: mean sqrt(n) xbar ybar and variance
///   sum_i (x_i - xbar)^2 sum_j (y_j - ybar)^2 / (n (n-1)).
std::pair<double, double> product_conditional_moments(std::span<const double> y,
                                                      std::span<const double> x);

namespace detail {

/// Runs fn(perm_index, permutation, thread_slot) over every permutation of the
/// plan, writing results into out[perm_index]. thread_slot < threads indexes
/// per-thread scratch. Statistic errors are rethrown tagged with the offending
/// permutation index. Results are independent of the thread count.
void run_permutations(const PermutationPlan& plan, int threads,
                      const std::function<double(int, std::span<const int>, int)>& fn,
                      std::vector<double>& out);

bool is_bijection(std::span<const int> perm, Eigen::Index n);

}  // namespace detail

}  // namespace tspt
