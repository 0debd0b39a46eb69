#include "bell/engine.hpp"

#include <cmath>

#include "bell/errors.hpp"
#include "bell/quantum.hpp"

namespace bell {

EventTimes LabGeometry::stamp(std::uint64_t round_index) const {
  const auto start = static_cast<std::int64_t>(round_index) * round_period_ns;
  EventTimes t;
  t.setting_issued_a = start + setting_delay_a_ns;
  t.setting_issued_b = start + setting_delay_b_ns;
  t.output_committed_a = t.setting_issued_a + response_latency_a_ns;
  t.output_committed_b = t.setting_issued_b + response_latency_b_ns;
  return t;
}

void LabGeometry::validate() const {
  if (!std::isfinite(separation_m) || separation_m < 0.0) {
    throw ConfigError("geometry.separation_m must be >= 0");
  }
  if (!std::isfinite(signal_speed_mps) || signal_speed_mps <= 0.0) {
    throw ConfigError("geometry.signal_speed_mps must be > 0");
  }
  if (round_period_ns < 0 || setting_delay_a_ns < 0 || setting_delay_b_ns < 0 ||
      response_latency_a_ns < 0 || response_latency_b_ns < 0) {
    throw ConfigError("geometry latencies must be >= 0");
  }
}

void ExperimentConfig::validate() const {
  if (rounds < 1) throw ConfigError("rounds must be >= 1");
  if (!StrategyRegistry::global().contains(strategy.name)) {
    throw ConfigError("unknown strategy '" + strategy.name + "'");
  }
  if (geometry) geometry->validate();
}

ExperimentSummary ExperimentSummary::from_records(std::span<const RoundRecord> records) {
  ExperimentSummary s;
  for (const auto& r : records) {
    const int p = r.pair.index();
    ++s.pair_counts[p];
    if (r.win) {
      ++s.wins;
      ++s.pair_wins[p];
    } else {
      ++s.losses;
    }
  }
  return s;
}

bool ExperimentLog::has_timestamps() const {
  if (records.empty()) return false;
  for (const auto& r : records) {
    if (!r.events) return false;
  }
  return true;
}

SettingPair draw_settings(RandomStream& rng, const SettingDistribution& dist) {
  const std::uint64_t bits = rng.next_u64();
  if (dist.is_uniform()) {
    const Setting a = (bits >> 63) ? Setting::S2 : Setting::S1;
    const Setting b = ((bits >> 62) & 1) ? Setting::S2 : Setting::S1;
    return {a, b};
  }
  const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
  const auto& p = dist.probabilities();
  double acc = 0.0;
  int last = 0;
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) continue;
    last = i;
    acc += p[i];
    if (u < acc) return SettingPair::from_index(i);
  }
  return SettingPair::from_index(last);
}

RoundRecord play_round(const Strategy& strategy, const StrategyState& state, SettingPair pair,
                       RunStreams& streams, std::uint64_t index, const RoundOptions& options) {
  RoundRecord rec;
  rec.index = index;
  rec.pair = pair;

  if (strategy.signaling()) {
    if (options.enforcement) {
      throw StructuralViolation("strategy " + std::string(strategy.name()) +
                                " needs the other party's setting; run refused");
    }
    rec.x = strategy.respond_with_peer_setting(Party::Alice, pair.a, pair.b, false);
    rec.y = strategy.respond_with_peer_setting(Party::Bob, pair.b, pair.a, false);
  } else if (strategy.uses_entanglement()) {
    // A fresh pair every round; nothing carries over between rounds.
    quantum::EntangledPair resource(quantum::phi_plus());
    rec.x = strategy.respond(Party::Alice, pair.a, state, streams.alice,
                             QubitPort(resource, Party::Alice, streams.quantum));
    rec.y = strategy.respond(Party::Bob, pair.b, state, streams.bob,
                             QubitPort(resource, Party::Bob, streams.quantum));
  } else {
    rec.x = strategy.respond(Party::Alice, pair.a, state, streams.alice);
    rec.y = strategy.respond(Party::Bob, pair.b, state, streams.bob);
  }

  rec.win = win_rule(pair, rec.x, rec.y);
  if (options.geometry) rec.events = options.geometry->stamp(index);
  return rec;
}

ExperimentLog run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto strategy = build_strategy(config.strategy);
  if (strategy->signaling() && config.enforcement) {
    throw StructuralViolation("strategy " + config.strategy.name +
                              " signals between parties; run refused with enforcement on");
  }

  ExperimentLog log;
  log.config = config;
  log.records.reserve(config.rounds);

  RunStreams streams(config.seed);
  const RoundOptions options{config.enforcement,
                             config.geometry ? &*config.geometry : nullptr};

  try {
    StrategyState state = strategy->initial_state(streams.shared);
    for (std::uint64_t n = 0; n < config.rounds; ++n) {
      const SettingPair pair = draw_settings(streams.settings, config.distribution);
      log.records.push_back(play_round(*strategy, state, pair, streams, n, options));
      state = strategy->between_rounds(std::move(state), log.records, streams.shared);
    }
  } catch (const std::exception& e) {
    log.summary = ExperimentSummary::from_records(log.records);
    throw ExperimentAborted("experiment aborted after " + std::to_string(log.records.size()) +
                                " rounds: " + e.what(),
                            std::move(log), std::current_exception());
  }

  log.summary = ExperimentSummary::from_records(log.records);
  return log;
}

void replicate(const ExperimentConfig& config, std::size_t count,
               const std::function<void(const ExperimentLog&)>& visit) {
  ExperimentConfig c = config;
  for (std::size_t i = 0; i < count; ++i) {
    c.seed = config.seed + i;
    visit(run_experiment(c));
  }
}

AuditReport spacetime_audit(const ExperimentLog& log) {
  if (!log.config.geometry) throw AuditInapplicable("log has no lab geometry");
  if (!log.has_timestamps()) throw AuditInapplicable("log has no event timestamps");

  AuditReport report;
  report.light_time_ns = log.config.geometry->light_time_ns();
  for (const auto& r : log.records) {
    const EventTimes& t = *r.events;
    const bool a_ok = double(t.output_committed_a - t.setting_issued_b) < report.light_time_ns;
    const bool b_ok = double(t.output_committed_b - t.setting_issued_a) < report.light_time_ns;
    if (!a_ok || !b_ok) report.violating_rounds.push_back(r.index);
    ++report.rounds_checked;
  }
  return report;
}

}  // namespace bell
