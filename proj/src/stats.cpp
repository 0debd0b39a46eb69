#include "bell/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace bell::stats {
namespace {

void check_p0(double p0) {
  if (!(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("p0 must lie in (0, 1)");
}

long double log_add(long double a, long double b) {
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

double log_binomial_tail(std::uint64_t n, std::uint64_t wins, double p0) {
  check_p0(p0);
  if (wins > n) throw std::invalid_argument("wins exceeds rounds");
  if (wins == 0) return 0.0;

  // Accumulate from j = n down to wins; every step adds a nonnegative
  // term, so the result is monotone in wins. Terms follow the ratio
  // t_j / t_{j+1} = (j+1)/(n-j) * q/p.
  const long double log_p = std::log(static_cast<long double>(p0));
  const long double log_odds = std::log1p(-static_cast<long double>(p0)) - log_p;
  long double term = static_cast<long double>(n) * log_p;
  long double total = term;
  for (std::uint64_t j = n; j-- > wins;) {
    term += std::log(static_cast<long double>(j + 1) / static_cast<long double>(n - j)) + log_odds;
    total = log_add(total, term);
  }
  return static_cast<double>(std::min(total, 0.0L));
}

double binomial_tail_pvalue(std::uint64_t n, std::uint64_t wins, double p0) {
  return std::exp(log_binomial_tail(n, wins, p0));
}

double log_azuma_bound(std::uint64_t n, std::uint64_t wins, double p0) {
  check_p0(p0);
  if (wins > n) throw std::invalid_argument("wins exceeds rounds");
  if (n == 0) return 0.0;
  const double excess = double(wins) / double(n) - p0;
  if (excess <= 0.0) return 0.0;
  return -2.0 * double(n) * excess * excess;
}

double azuma_bound(std::uint64_t n, std::uint64_t wins, double p0) {
  return std::exp(log_azuma_bound(n, wins, p0));
}

TestReport analyze_counts(std::uint64_t rounds, std::uint64_t wins, std::span<const double> alphas,
                          double p0) {
  if (rounds == 0) throw std::invalid_argument("cannot analyze an empty experiment");
  TestReport r;
  r.rounds = rounds;
  r.wins = wins;
  r.rate = double(wins) / double(rounds);
  r.p0 = p0;
  r.ln_p_value_exact = log_binomial_tail(rounds, wins, p0);
  r.p_value_exact = std::exp(r.ln_p_value_exact);
  r.ln_p_value_azuma = log_azuma_bound(rounds, wins, p0);
  r.p_value_azuma = std::exp(r.ln_p_value_azuma);
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("significance level must lie in (0, 1)");
    if (r.ln_p_value_exact < std::log(a)) r.reject_at.push_back(a);
  }
  return r;
}

TestReport analyze_log(const ExperimentLog& log, std::span<const double> alphas, double p0) {
  if (log.records.empty()) throw std::invalid_argument("cannot analyze an empty log");
  const auto s = ExperimentSummary::from_records(log.records);
  return analyze_counts(s.rounds(), s.wins, alphas, p0);
}

std::uint64_t wins_needed(double rate, std::uint64_t n) {
  const double k = std::ceil(rate * double(n) - 1e-9);
  return k <= 0.0 ? 0 : std::min<std::uint64_t>(n, static_cast<std::uint64_t>(k));
}

namespace {

enum class Screen { NotSignificant, Undecided };

/// Partial sums of the upper tail are lower bounds on it; once one exceeds
/// alpha the full tail is not needed.
Screen screen_tail(std::uint64_t n, std::uint64_t k, double p0, double alpha) {
  const double q0 = 1.0 - p0;
  const double log_first = std::lgamma(double(n) + 1) - std::lgamma(double(k) + 1) -
                           std::lgamma(double(n - k) + 1) + double(k) * std::log(p0) +
                           double(n - k) * std::log(q0);
  double term = std::exp(log_first);
  double partial = 0.0;
  const double threshold = alpha * (1.0 + 1e-9);
  for (std::uint64_t j = k; j <= n; ++j) {
    partial += term;
    if (partial >= threshold) return Screen::NotSignificant;
    if (term <= partial * 1e-18 || term == 0.0) break;
    term *= double(n - j) / double(j + 1) * p0 / q0;
  }
  return Screen::Undecided;
}

}  // namespace

PowerReport required_rounds(double assumed_rate, double alpha, double p0, std::uint64_t search_cap) {
  check_p0(p0);
  if (!(assumed_rate > p0 && assumed_rate < 1.0)) {
    throw std::invalid_argument("assumed rate must lie in (p0, 1)");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");

  PowerReport r;
  r.assumed_rate = assumed_rate;
  r.alpha = alpha;
  r.p0 = p0;
  r.search_cap = search_cap;

  const boost::math::normal standard;
  const double z = boost::math::quantile(standard, 1.0 - alpha);
  const double root = z * std::sqrt(p0 * (1.0 - p0)) / (assumed_rate - p0);
  r.required_n_normal_approx = root * root;

  const double log_alpha = std::log(alpha);
  for (std::uint64_t n = 1; n <= search_cap; ++n) {
    const std::uint64_t k = wins_needed(assumed_rate, n);
    if (screen_tail(n, k, p0, alpha) == Screen::NotSignificant) continue;
    if (log_binomial_tail(n, k, p0) < log_alpha) {
      r.required_n_exact = n;
      break;
    }
  }
  return r;
}

NoSignalingReport no_signaling_check(const ExperimentLog& log, std::uint64_t min_count) {
  NoSignalingReport report;
  std::array<std::uint64_t, 4> count{};
  std::array<std::uint64_t, 4> x_plus{};
  std::array<std::uint64_t, 4> y_plus{};
  for (const auto& r : log.records) {
    const int p = r.pair.index();
    ++count[p];
    if (r.x == Outcome::plus()) ++x_plus[p];
    if (r.y == Outcome::plus()) ++y_plus[p];
  }
  report.min_pair_count = *std::min_element(count.begin(), count.end());
  report.sufficient_data = report.min_pair_count >= min_count;

  auto compare = [&](Party party, Setting own) {
    MarginalComparison c;
    c.party = party;
    c.own_setting = own;
    const auto pair_with = [&](Setting other) {
      return party == Party::Alice ? SettingPair{own, other}.index() : SettingPair{other, own}.index();
    };
    const int i1 = pair_with(Setting::S1);
    const int i2 = pair_with(Setting::S2);
    const auto& plus = party == Party::Alice ? x_plus : y_plus;
    c.n_other_s1 = count[i1];
    c.n_other_s2 = count[i2];
    if (c.n_other_s1 == 0 || c.n_other_s2 == 0) return c;
    c.p_plus_other_s1 = double(plus[i1]) / double(c.n_other_s1);
    c.p_plus_other_s2 = double(plus[i2]) / double(c.n_other_s2);
    c.discrepancy = std::abs(c.p_plus_other_s1 - c.p_plus_other_s2);
    const double pooled = double(plus[i1] + plus[i2]) / double(c.n_other_s1 + c.n_other_s2);
    const double se = std::sqrt(pooled * (1.0 - pooled) *
                                (1.0 / double(c.n_other_s1) + 1.0 / double(c.n_other_s2)));
    c.z_score = se > 0.0 ? c.discrepancy / se : 0.0;
    return c;
  };

  report.comparisons = {compare(Party::Alice, Setting::S1), compare(Party::Alice, Setting::S2),
                        compare(Party::Bob, Setting::S1), compare(Party::Bob, Setting::S2)};
  for (const auto& c : report.comparisons) {
    report.max_discrepancy = std::max(report.max_discrepancy, c.discrepancy);
    report.max_z_score = std::max(report.max_z_score, c.z_score);
  }
  return report;
}

}  // namespace bell::stats
