#include "bell/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bell/errors.hpp"
#include "bell/text.hpp"

namespace bell {
namespace {

std::uint8_t encode(Outcome o) { return o == Outcome::plus() ? 0 : 1; }
Outcome decode(std::uint8_t b) { return b == 0 ? Outcome::plus() : Outcome::minus(); }

void reject_unknown(const std::map<std::string, std::string>& params,
                    std::initializer_list<std::string_view> known, std::string_view strategy) {
  for (const auto& [key, value] : params) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown parameter '" + key + "' for strategy " + std::string(strategy));
    }
  }
}

std::array<double, 16> parse_weights(const std::string& text) {
  std::array<double, 16> w{};
  if (text == "uniform") {
    w.fill(1.0 / 16.0);
    return w;
  }
  if (text == "optimal") {
    for (const auto& t : optimal_tables()) w[t.index()] = 1.0 / 8.0;
    return w;
  }
  const auto parts = text::split(text, ',');
  if (parts.size() != 16) throw ConfigError("mixture weights need 16 entries");
  for (std::size_t i = 0; i < 16; ++i) {
    auto v = text::parse_double(parts[i]);
    if (!v) throw ConfigError("bad mixture weight '" + std::string(parts[i]) + "'");
    w[i] = *v;
  }
  return w;
}

double angle_param(const std::map<std::string, std::string>& params, const std::string& key,
                   double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  auto v = text::parse_double(it->second);
  if (!v) throw ConfigError("bad angle for " + key + ": '" + it->second + "'");
  return *v;
}

}  // namespace

Outcome QubitPort::measure(quantum::MeasurementAngle angle) const {
  if (!pair_) throw StructuralViolation("no entangled pair was prepared for this round");
  return pair_->measure(side_, angle, *rng_);
}

StrategyState Strategy::between_rounds(StrategyState state, std::span<const RoundRecord>,
                                       RandomStream&) const {
  return state;
}

std::optional<CounterfactualTable> Strategy::committed_table(const StrategyState&) const {
  return std::nullopt;
}

Outcome Strategy::respond(Party party, Setting setting, const StrategyState& state,
                          RandomStream& rng, QubitPort qubit) const {
  if (!state.initialized) throw std::logic_error("strategy state is not initialized");
  if (party != Party::Alice && party != Party::Bob) throw std::logic_error("unknown party");
  const Bytes& local = party == Party::Alice ? state.alice_local : state.bob_local;
  const PartyView view{party, local, state.shared, qubit};
  return respond_local(setting, view, rng);
}

Outcome Strategy::respond_with_peer_setting(Party, Setting, Setting, bool) const {
  throw StructuralViolation("strategy " + std::string(name()) +
                            " does not take the other party's setting");
}

std::optional<CounterfactualTable> TableStrategy::committed_table(const StrategyState& state) const {
  if (!state.initialized || state.alice_local.size() != 2 || state.bob_local.size() != 2) {
    return std::nullopt;
  }
  return CounterfactualTable{decode(state.alice_local[0]), decode(state.alice_local[1]),
                             decode(state.bob_local[0]), decode(state.bob_local[1])};
}

Outcome TableStrategy::respond_local(Setting setting, const PartyView& view, RandomStream&) const {
  if (view.local.size() != 2) throw std::logic_error("table strategy has no committed table");
  return decode(view.local[setting == Setting::S1 ? 0 : 1]);
}

void TableStrategy::commit(StrategyState& state, const CounterfactualTable& table) {
  state.alice_local = {encode(table.x1), encode(table.x2)};
  state.bob_local = {encode(table.y1), encode(table.y2)};
  state.initialized = true;
}

StrategyState DeterministicStrategy::initial_state(RandomStream&) const {
  StrategyState s;
  commit(s, table_);
  return s;
}

MixtureStrategy::MixtureStrategy(std::array<double, 16> weights) : weights_(weights) {
  double sum = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) throw ConfigError("mixture weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("mixture weights must sum to 1");
}

CounterfactualTable MixtureStrategy::draw(RandomStream& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  int last = 0;
  for (int i = 0; i < 16; ++i) {
    if (weights_[i] == 0.0) continue;
    last = i;
    acc += weights_[i];
    if (u < acc) return CounterfactualTable::from_index(i);
  }
  return CounterfactualTable::from_index(last);
}

StrategyState MixtureStrategy::initial_state(RandomStream& shared_rng) const {
  StrategyState s;
  commit(s, draw(shared_rng));
  return s;
}

StrategyState MixtureStrategy::between_rounds(StrategyState state, std::span<const RoundRecord>,
                                              RandomStream& shared_rng) const {
  commit(state, draw(shared_rng));
  return state;
}

double MixtureStrategy::expected_win_probability() const {
  double w = 0.0;
  for (const auto& v : enumerate_deterministic_strategies()) {
    w += weights_[v.table.index()] * v.win_probability.value();
  }
  return w;
}

StrategyState AdaptiveStrategy::initial_state(RandomStream&) const {
  StrategyState s;
  commit(s, policy_(s.shared, {}));
  return s;
}

StrategyState AdaptiveStrategy::between_rounds(StrategyState state,
                                               std::span<const RoundRecord> history,
                                               RandomStream& shared_rng) const {
  if (history.empty()) return initial_state(shared_rng);
  commit(state, policy_(state.shared, history));
  return state;
}

std::array<CounterfactualTable, 8> optimal_tables() {
  std::array<CounterfactualTable, 8> out;
  std::size_t n = 0;
  for (const auto& v : enumerate_deterministic_strategies()) {
    if (v.win_probability.quarters == 3) out[n++] = v.table;
  }
  return out;
}

AdaptivePolicy switch_on_loss_policy(int start) {
  if (start < 0 || start > 7) throw ConfigError("adaptive-switch start must be in 0..7");
  const auto tables = optimal_tables();
  return [tables, start](Bytes& memory, std::span<const RoundRecord> history) {
    if (history.empty() || memory.size() != 1) {
      memory = {static_cast<std::uint8_t>(start)};
    } else if (!history.back().win) {
      memory[0] = static_cast<std::uint8_t>((memory[0] + 1) % 8);
    }
    return tables[memory[0]];
  };
}

AdaptivePolicy least_frequent_pair_policy() {
  const auto tables = optimal_tables();
  return [tables](Bytes& memory, std::span<const RoundRecord> history) {
    // memory: four little-endian 32-bit pair counts
    if (history.empty() || memory.size() != 16) memory.assign(16, 0);
    auto count = [&memory](int pair) {
      std::uint32_t c = 0;
      for (int k = 0; k < 4; ++k) c |= std::uint32_t(memory[4 * pair + k]) << (8 * k);
      return c;
    };
    if (!history.empty()) {
      const int pair = history.back().pair.index();
      const std::uint32_t c = count(pair) + 1;
      for (int k = 0; k < 4; ++k) memory[4 * pair + k] = std::uint8_t(c >> (8 * k));
    }
    int rarest = 0;
    for (int p = 1; p < 4; ++p) {
      if (count(p) < count(rarest)) rarest = p;
    }
    for (const auto& t : tables) {
      if (loses_at(t, SettingPair::from_index(rarest))) return t;
    }
    return tables[0];
  };
}

StrategyState SignalingCheat::initial_state(RandomStream&) const {
  StrategyState s;
  s.initialized = true;
  return s;
}

Outcome SignalingCheat::respond_local(Setting, const PartyView&, RandomStream&) const {
  throw StructuralViolation("signaling-cheat cannot respond from local information alone");
}

Outcome SignalingCheat::respond_with_peer_setting(Party party, Setting setting,
                                                  Setting other_setting, bool enforcement) const {
  return signaling_cheat_respond(party, setting, other_setting, enforcement);
}

Outcome signaling_cheat_respond(Party party, Setting setting, Setting other_setting,
                                bool enforcement) {
  if (enforcement) {
    throw StructuralViolation("signaling strategy invoked with no-signaling enforcement on");
  }
  if (party == Party::Alice) return Outcome::plus();
  const bool both_one = setting == Setting::S1 && other_setting == Setting::S1;
  return both_one ? Outcome::plus() : Outcome::minus();
}

StrategyState QuantumStrategy::initial_state(RandomStream&) const {
  StrategyState s;
  s.initialized = true;
  return s;
}

Outcome QuantumStrategy::respond_local(Setting setting, const PartyView& view,
                                       RandomStream&) const {
  const auto angle = view.party == Party::Alice ? angles_.alice(setting) : angles_.bob(setting);
  return view.qubit.measure(angle);
}

StrategyRegistry& StrategyRegistry::global() {
  static StrategyRegistry registry = [] {
    StrategyRegistry r;
    r.add("deterministic", [](const auto& params) -> std::unique_ptr<Strategy> {
      reject_unknown(params, {"table"}, "deterministic");
      auto it = params.find("table");
      if (it == params.end()) throw ConfigError("deterministic strategy needs a table");
      try {
        return std::make_unique<DeterministicStrategy>(CounterfactualTable::parse(it->second));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    });
    r.add("mixture", [](const auto& params) -> std::unique_ptr<Strategy> {
      reject_unknown(params, {"weights"}, "mixture");
      auto it = params.find("weights");
      return std::make_unique<MixtureStrategy>(
          parse_weights(it == params.end() ? "uniform" : it->second));
    });
    r.add("adaptive-switch", [](const auto& params) -> std::unique_ptr<Strategy> {
      reject_unknown(params, {"start"}, "adaptive-switch");
      std::int64_t start = 0;
      if (auto it = params.find("start"); it != params.end()) {
        auto v = text::parse_int(it->second);
        if (!v) throw ConfigError("bad adaptive-switch start '" + it->second + "'");
        start = *v;
      }
      if (start < 0 || start > 7) throw ConfigError("adaptive-switch start must be in 0..7");
      return std::make_unique<AdaptiveStrategy>("adaptive-switch",
                                                switch_on_loss_policy(int(start)));
    });
    r.add("adaptive-frequency", [](const auto& params) -> std::unique_ptr<Strategy> {
      reject_unknown(params, {}, "adaptive-frequency");
      return std::make_unique<AdaptiveStrategy>("adaptive-frequency",
                                                least_frequent_pair_policy());
    });
    r.add(
        "signaling-cheat",
        [](const auto& params) -> std::unique_ptr<Strategy> {
          reject_unknown(params, {}, "signaling-cheat");
          return std::make_unique<SignalingCheat>();
        },
        true);
    r.add("quantum", [](const auto& params) -> std::unique_ptr<Strategy> {
      reject_unknown(params, {"alice1", "alice2", "bob1", "bob2"}, "quantum");
      const auto opt = quantum::optimal_angles();
      return std::make_unique<QuantumStrategy>(quantum::AngleQuadruple{
          angle_param(params, "alice1", opt.alice1.radians()),
          angle_param(params, "alice2", opt.alice2.radians()),
          angle_param(params, "bob1", opt.bob1.radians()),
          angle_param(params, "bob2", opt.bob2.radians())});
    });
    return r;
  }();
  return registry;
}

void StrategyRegistry::add(std::string name, StrategyFactory factory, bool signaling) {
  entries_[std::move(name)] = Entry{std::move(factory), signaling};
}

bool StrategyRegistry::contains(const std::string& name) const { return entries_.contains(name); }

bool StrategyRegistry::is_signaling(const std::string& name) const {
  auto it = entries_.find(name);
  return it != entries_.end() && it->second.signaling;
}

std::vector<std::string> StrategyRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, entry] : entries_) out.push_back(name);
  return out;
}

std::unique_ptr<Strategy> StrategyRegistry::build(const StrategyDescriptor& descriptor) const {
  auto it = entries_.find(descriptor.name);
  if (it == entries_.end()) throw ConfigError("unknown strategy '" + descriptor.name + "'");
  auto strategy = it->second.factory(descriptor.parameters);
  if (strategy->signaling() != it->second.signaling) {
    throw std::logic_error("registry signaling flag disagrees with strategy " + descriptor.name);
  }
  return strategy;
}

StrategyDescriptor make_descriptor(std::string name, std::map<std::string, std::string> parameters) {
  const bool signaling = StrategyRegistry::global().is_signaling(name);
  return {std::move(name), std::move(parameters), signaling};
}

std::unique_ptr<Strategy> build_strategy(const StrategyDescriptor& descriptor) {
  return StrategyRegistry::global().build(descriptor);
}

}  // namespace bell
