#pragma once

// Referee: draws settings, runs the two round phases with structural
// no-signaling, stamps simulated event times and audits them.

#include <array>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "bell/core.hpp"
#include "bell/random.hpp"
#include "bell/strategies.hpp"

namespace bell {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Positions and latencies on the simulated clock. Round n starts at
/// n * round_period_ns; each setting is issued setting_delay_*_ns after
/// the round start and the output is committed response_latency_*_ns
/// after that party's setting.
struct LabGeometry {
  double separation_m = 0.0;
  double signal_speed_mps = kSpeedOfLight;
  std::int64_t round_period_ns = 100'000;
  std::int64_t setting_delay_a_ns = 0;
  std::int64_t setting_delay_b_ns = 0;
  std::int64_t response_latency_a_ns = 0;
  std::int64_t response_latency_b_ns = 0;

  double light_time_ns() const { return separation_m / signal_speed_mps * 1e9; }
  EventTimes stamp(std::uint64_t round_index) const;
  /// Throws ConfigError on negative separation, non-positive speed or
  /// negative latencies.
  void validate() const;

  bool operator==(const LabGeometry&) const = default;
};

struct ExperimentConfig {
  std::uint64_t rounds = 1;
  StrategyDescriptor strategy;
  std::uint64_t seed = 0;
  SettingDistribution distribution;
  bool enforcement = true;
  std::optional<LabGeometry> geometry;

  /// Throws ConfigError.
  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

struct ExperimentSummary {
  std::uint64_t wins = 0;
  std::uint64_t losses = 0;
  std::array<std::uint64_t, 4> pair_counts{};
  std::array<std::uint64_t, 4> pair_wins{};

  static ExperimentSummary from_records(std::span<const RoundRecord> records);
  std::uint64_t rounds() const { return wins + losses; }
  double win_rate() const { return rounds() ? double(wins) / double(rounds()) : 0.0; }

  bool operator==(const ExperimentSummary&) const = default;
};

struct ExperimentLog {
  ExperimentConfig config;
  std::vector<RoundRecord> records;
  ExperimentSummary summary;

  bool has_timestamps() const;
  bool operator==(const ExperimentLog&) const = default;
};

/// A run stopped partway. partial() holds the completed rounds and
/// cause() the original error.
class ExperimentAborted : public std::runtime_error {
 public:
  ExperimentAborted(const std::string& what, ExperimentLog partial, std::exception_ptr cause)
      : std::runtime_error(what), partial_(std::move(partial)), cause_(std::move(cause)) {}

  const ExperimentLog& partial() const { return partial_; }
  std::exception_ptr cause() const { return cause_; }

 private:
  ExperimentLog partial_;
  std::exception_ptr cause_;
};

/// Independent fair coins under the uniform distribution (the top two bits
/// of one draw); otherwise one categorical draw over the four pairs.
SettingPair draw_settings(RandomStream& rng,
                          const SettingDistribution& dist = SettingDistribution::uniform());

struct RoundOptions {
  bool enforcement = true;
  const LabGeometry* geometry = nullptr;
};

/// Plays one round. Each responder receives only its own setting; Alice
/// responds first. Throws StructuralViolation for a signaling strategy
/// with enforcement on.
RoundRecord play_round(const Strategy& strategy, const StrategyState& state, SettingPair pair,
                       RunStreams& streams, std::uint64_t index, const RoundOptions& options = {});

/// Throws ConfigError for an invalid config and StructuralViolation when a
/// signaling strategy is run with enforcement on; errors inside the round
/// loop surface as ExperimentAborted.
ExperimentLog run_experiment(const ExperimentConfig& config);

/// Runs `count` replications with seeds config.seed, config.seed + 1, ...
void replicate(const ExperimentConfig& config, std::size_t count,
               const std::function<void(const ExperimentLog&)>& visit);

struct AuditReport {
  double light_time_ns = 0.0;
  std::size_t rounds_checked = 0;
  std::vector<std::uint64_t> violating_rounds;

  bool passed() const { return violating_rounds.empty(); }
};

/// Round n passes iff each output is committed strictly before the other
/// party's setting could arrive at light speed. Throws AuditInapplicable
/// without geometry or timestamps.
AuditReport spacetime_audit(const ExperimentLog& log);

}  // namespace bell
