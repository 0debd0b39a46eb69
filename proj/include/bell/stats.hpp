#pragma once

// Evidence against the classical 3/4 ceiling. Under any local strategy,
// however adaptive, each round is won with conditional probability at most
// 3/4 given the past, so the win count is stochastically dominated by
// Binomial(N, 3/4) and its upper tail is a valid p-value.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bell/core.hpp"
#include "bell/engine.hpp"

namespace bell::stats {

inline constexpr double kClassicalBound = 0.75;
inline constexpr std::uint64_t kDefaultExactSearchCap = 1'000'000;

/// Natural log of P(Bin(n, p0) >= wins). Throws std::invalid_argument
/// unless wins <= n and 0 < p0 < 1.
double log_binomial_tail(std::uint64_t n, std::uint64_t wins, double p0 = kClassicalBound);

/// P(Bin(n, p0) >= wins). Underflows to 0 below ~1e-308; use
/// log_binomial_tail there.
double binomial_tail_pvalue(std::uint64_t n, std::uint64_t wins, double p0 = kClassicalBound);

/// -2 n (wins/n - p0)^2 when wins/n > p0, else 0.
double log_azuma_bound(std::uint64_t n, std::uint64_t wins, double p0 = kClassicalBound);
double azuma_bound(std::uint64_t n, std::uint64_t wins, double p0 = kClassicalBound);

struct TestReport {
  std::uint64_t rounds = 0;
  std::uint64_t wins = 0;
  double rate = 0.0;
  double p0 = kClassicalBound;
  double p_value_exact = 1.0;
  double ln_p_value_exact = 0.0;
  double p_value_azuma = 1.0;
  double ln_p_value_azuma = 0.0;
  std::vector<double> reject_at;
};

TestReport analyze_counts(std::uint64_t rounds, std::uint64_t wins, std::span<const double> alphas,
                          double p0 = kClassicalBound);

/// Throws std::invalid_argument for an empty log.
TestReport analyze_log(const ExperimentLog& log, std::span<const double> alphas,
                       double p0 = kClassicalBound);

/// Smallest win count reaching the rate: ceil(rate * n) with a 1e-9 slack
/// so that e.g. 0.8 * 5 counts as 4.
std::uint64_t wins_needed(double rate, std::uint64_t n);

struct PowerReport {
  double assumed_rate = 0.0;
  double alpha = 0.0;
  double p0 = kClassicalBound;
  std::uint64_t search_cap = kDefaultExactSearchCap;
  /// Empty when no n <= search_cap reaches significance.
  std::optional<std::uint64_t> required_n_exact;
  double required_n_normal_approx = 0.0;

  bool feasible() const { return required_n_exact.has_value(); }
};

/// required_n_exact is the smallest n with
/// binomial_tail_pvalue(n, wins_needed(rate, n), p0) < alpha. The normal
/// approximation is (z_{1-alpha} sqrt(p0 (1 - p0)) / (rate - p0))^2.
/// Throws std::invalid_argument unless p0 < rate < 1 and 0 < alpha < 1.
PowerReport required_rounds(double assumed_rate, double alpha, double p0 = kClassicalBound,
                            std::uint64_t search_cap = kDefaultExactSearchCap);

/// One marginal comparison: the party's +1 frequency at its own setting,
/// split by the other party's setting.
struct MarginalComparison {
  Party party = Party::Alice;
  Setting own_setting = Setting::S1;
  std::uint64_t n_other_s1 = 0;
  std::uint64_t n_other_s2 = 0;
  double p_plus_other_s1 = 0.0;
  double p_plus_other_s2 = 0.0;
  double discrepancy = 0.0;
  double z_score = 0.0;
};

struct NoSignalingReport {
  bool sufficient_data = false;
  std::uint64_t min_pair_count = 0;
  std::array<MarginalComparison, 4> comparisons{};
  double max_discrepancy = 0.0;
  double max_z_score = 0.0;
};

/// Two-proportion z-tests of marginal invariance. Flags insufficient data
/// when any setting pair occurs fewer than `min_count` times.
NoSignalingReport no_signaling_check(const ExperimentLog& log, std::uint64_t min_count = 30);

}  // namespace bell::stats
