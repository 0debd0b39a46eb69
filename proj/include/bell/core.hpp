#pragma once

// Game definition for the two-party CHSH game: settings, outcomes, the
// counterfactual table of a classical round, and the loss rule.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bell {

enum class Setting : std::uint8_t { S1 = 1, S2 = 2 };

enum class Party : std::uint8_t { Alice, Bob };

/// A measurement result, +1 or -1.
class Outcome {
 public:
  constexpr Outcome() = default;

  static constexpr Outcome plus() { return Outcome(1); }
  static constexpr Outcome minus() { return Outcome(-1); }

  /// Throws std::invalid_argument unless value is +1 or -1.
  static Outcome from_int(int value);

  constexpr int value() const { return value_; }
  constexpr Outcome operator-() const { return Outcome(-value_); }
  constexpr Outcome operator*(Outcome other) const { return Outcome(value_ * other.value_); }
  constexpr bool operator==(const Outcome&) const = default;

 private:
  constexpr explicit Outcome(int v) : value_(v) {}
  int value_ = 1;
};

struct SettingPair {
  Setting a = Setting::S1;
  Setting b = Setting::S1;

  /// Position in the canonical order 11, 12, 21, 22.
  constexpr int index() const {
    return (a == Setting::S1 ? 0 : 2) + (b == Setting::S1 ? 0 : 1);
  }
  static constexpr SettingPair from_index(int i) {
    return {(i & 2) ? Setting::S2 : Setting::S1, (i & 1) ? Setting::S2 : Setting::S1};
  }
  constexpr bool operator==(const SettingPair&) const = default;

  std::string label() const;
};

inline constexpr std::array<SettingPair, 4> kAllPairs = {
    SettingPair::from_index(0), SettingPair::from_index(1),
    SettingPair::from_index(2), SettingPair::from_index(3)};

/// The four potential outputs of one classical round: what Alice would
/// output for each of her settings and likewise for Bob.
struct CounterfactualTable {
  Outcome x1, x2, y1, y2;

  constexpr Outcome alice(Setting s) const { return s == Setting::S1 ? x1 : x2; }
  constexpr Outcome bob(Setting s) const { return s == Setting::S1 ? y1 : y2; }
  constexpr Outcome output(Party p, Setting s) const {
    return p == Party::Alice ? alice(s) : bob(s);
  }

  /// Tables are numbered 0..15; bit 3 (MSB) is set when x1 = -1, then
  /// x2, y1, y2 down to bit 0. Table 0 is all +1.
  int index() const;
  static CounterfactualTable from_index(int index);

  constexpr bool operator==(const CounterfactualTable&) const = default;

  std::string to_string() const;
  /// Parses "+1,+1,+1,-1" (x1,x2,y1,y2).
  static CounterfactualTable parse(const std::string& text);
};

/// Probability vector over setting pairs in the order 11, 12, 21, 22.
class SettingDistribution {
 public:
  SettingDistribution() = default;
  /// Throws std::invalid_argument on negative entries or a sum off by
  /// more than 1e-12.
  explicit SettingDistribution(std::array<double, 4> probs);

  static SettingDistribution uniform() { return {}; }
  static SettingDistribution point_mass(SettingPair pair);

  double operator[](SettingPair pair) const { return probs_[pair.index()]; }
  const std::array<double, 4>& probabilities() const { return probs_; }
  bool is_uniform() const;

  bool operator==(const SettingDistribution&) const = default;

 private:
  std::array<double, 4> probs_{0.25, 0.25, 0.25, 0.25};
};

/// Nanosecond timestamps on the simulated global clock.
struct EventTimes {
  std::int64_t setting_issued_a = 0;
  std::int64_t setting_issued_b = 0;
  std::int64_t output_committed_a = 0;
  std::int64_t output_committed_b = 0;

  bool operator==(const EventTimes&) const = default;
};

struct RoundRecord {
  std::uint64_t index = 0;
  SettingPair pair;
  Outcome x;
  Outcome y;
  bool win = false;
  std::optional<EventTimes> events;

  bool operator==(const RoundRecord&) const = default;
};

/// Win iff (pair = 11 and x = y) or (pair != 11 and x != y).
constexpr bool win_rule(SettingPair pair, Outcome x, Outcome y) {
  const bool same = x == y;
  return pair.index() == 0 ? same : !same;
}

/// The loss event at a pair, evaluated on the counterfactual table.
constexpr bool loses_at(const CounterfactualTable& t, SettingPair pair) {
  return !win_rule(pair, t.alice(pair.a), t.bob(pair.b));
}

/// I{x1 != y1} + I{x2 = y1} + I{x2 = y2} + I{x1 = y2}. Always odd, >= 1.
int indicator_sum(const CounterfactualTable& t);

/// Number of true equalities among x1=y1, x2=y1, x2=y2, x1=y2. Always even.
int equality_count(const CounterfactualTable& t);

/// (x1 y1)(x2 y1)(x2 y2)(x1 y2); identically +1.
Outcome parity_product(const CounterfactualTable& t);

double loss_probability(const CounterfactualTable& t,
                        const SettingDistribution& dist = SettingDistribution::uniform());

/// Exact win probability under uniform settings, as a count of winning
/// pairs out of four.
struct QuarterProbability {
  int quarters = 0;

  double value() const { return quarters / 4.0; }
  auto operator<=>(const QuarterProbability&) const = default;
};

struct DeterministicStrategyValue {
  CounterfactualTable table;
  QuarterProbability win_probability;
};

/// All 16 deterministic strategies, ordered by table index.
std::vector<DeterministicStrategyValue> enumerate_deterministic_strategies();

}  // namespace bell
