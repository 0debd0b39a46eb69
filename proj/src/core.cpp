#include "bell/core.hpp"

#include <cmath>
#include <sstream>

namespace bell {

Outcome Outcome::from_int(int value) {
  if (value == 1) return plus();
  if (value == -1) return minus();
  throw std::invalid_argument("outcome must be +1 or -1, got " + std::to_string(value));
}

std::string SettingPair::label() const {
  std::string s;
  s += a == Setting::S1 ? '1' : '2';
  s += b == Setting::S1 ? '1' : '2';
  return s;
}

int CounterfactualTable::index() const {
  auto bit = [](Outcome o) { return o == Outcome::minus() ? 1 : 0; };
  return (bit(x1) << 3) | (bit(x2) << 2) | (bit(y1) << 1) | bit(y2);
}

CounterfactualTable CounterfactualTable::from_index(int index) {
  if (index < 0 || index > 15) {
    throw std::invalid_argument("table index out of range: " + std::to_string(index));
  }
  auto entry = [index](int bit) {
    return (index >> bit) & 1 ? Outcome::minus() : Outcome::plus();
  };
  return {entry(3), entry(2), entry(1), entry(0)};
}

std::string CounterfactualTable::to_string() const {
  auto fmt = [](Outcome o) { return o == Outcome::plus() ? std::string("+1") : std::string("-1"); };
  return fmt(x1) + "," + fmt(x2) + "," + fmt(y1) + "," + fmt(y2);
}

CounterfactualTable CounterfactualTable::parse(const std::string& text) {
  std::array<Outcome, 4> entries;
  std::istringstream in(text);
  std::string item;
  std::size_t n = 0;
  while (std::getline(in, item, ',')) {
    if (n == 4) throw std::invalid_argument("table has more than four entries: " + text);
    while (!item.empty() && item.front() == ' ') item.erase(item.begin());
    while (!item.empty() && item.back() == ' ') item.pop_back();
    if (item == "+1" || item == "1") {
      entries[n] = Outcome::plus();
    } else if (item == "-1") {
      entries[n] = Outcome::minus();
    } else {
      throw std::invalid_argument("bad table entry '" + item + "'");
    }
    ++n;
  }
  if (n != 4) throw std::invalid_argument("table needs four entries: " + text);
  return {entries[0], entries[1], entries[2], entries[3]};
}

SettingDistribution::SettingDistribution(std::array<double, 4> probs) : probs_(probs) {
  double sum = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) {
      throw std::invalid_argument("setting distribution has a negative or non-finite entry");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("setting distribution does not sum to 1");
  }
}

SettingDistribution SettingDistribution::point_mass(SettingPair pair) {
  std::array<double, 4> p{};
  p[pair.index()] = 1.0;
  return SettingDistribution(p);
}

bool SettingDistribution::is_uniform() const {
  for (double p : probs_) {
    if (p != 0.25) return false;
  }
  return true;
}

int indicator_sum(const CounterfactualTable& t) {
  return int(t.x1 != t.y1) + int(t.x2 == t.y1) + int(t.x2 == t.y2) + int(t.x1 == t.y2);
}

int equality_count(const CounterfactualTable& t) {
  return int(t.x1 == t.y1) + int(t.x2 == t.y1) + int(t.x2 == t.y2) + int(t.x1 == t.y2);
}

Outcome parity_product(const CounterfactualTable& t) {
  return (t.x1 * t.y1) * (t.x2 * t.y1) * (t.x2 * t.y2) * (t.x1 * t.y2);
}

double loss_probability(const CounterfactualTable& t, const SettingDistribution& dist) {
  double loss = 0.0;
  for (SettingPair pair : kAllPairs) {
    if (loses_at(t, pair)) loss += dist[pair];
  }
  return loss;
}

std::vector<DeterministicStrategyValue> enumerate_deterministic_strategies() {
  std::vector<DeterministicStrategyValue> out;
  out.reserve(16);
  for (int i = 0; i < 16; ++i) {
    const auto table = CounterfactualTable::from_index(i);
    int wins = 0;
    for (SettingPair pair : kAllPairs) {
      if (!loses_at(table, pair)) ++wins;
    }
    out.push_back({table, QuarterProbability{wins}});
  }
  return out;
}

}  // namespace bell
