#pragma once

// Strategy contract and the built-in strategy registry.
//
// A round has two phases. In the response phase each party's responder
// sees only a PartyView: its own setting, its own local memory, the frozen
// shared memory, its own random stream and (for entangled strategies) its
// half of a freshly prepared pair. In the between-rounds phase the strategy
// sees the full history and may rewrite all of its state.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bell/core.hpp"
#include "bell/quantum.hpp"
#include "bell/random.hpp"

namespace bell {

using Bytes = std::vector<std::uint8_t>;

struct StrategyState {
  Bytes alice_local;
  Bytes bob_local;
  Bytes shared;
  bool initialized = false;

  bool operator==(const StrategyState&) const = default;
};

/// One party's handle on its qubit of the round's entangled pair.
class QubitPort {
 public:
  QubitPort() = default;
  QubitPort(quantum::EntangledPair& pair, Party side, RandomStream& rng)
      : pair_(&pair), side_(side), rng_(&rng) {}

  explicit operator bool() const { return pair_ != nullptr; }
  Outcome measure(quantum::MeasurementAngle angle) const;

 private:
  quantum::EntangledPair* pair_ = nullptr;
  Party side_ = Party::Alice;
  RandomStream* rng_ = nullptr;
};

struct PartyView {
  Party party;
  std::span<const std::uint8_t> local;
  std::span<const std::uint8_t> shared;
  QubitPort qubit;
};

struct StrategyDescriptor {
  std::string name;
  std::map<std::string, std::string> parameters;
  bool signaling = false;

  bool operator==(const StrategyDescriptor&) const = default;
};

class Strategy {
 public:
  virtual ~Strategy() = default;

  virtual std::string_view name() const = 0;
  virtual bool signaling() const { return false; }
  virtual bool uses_entanglement() const { return false; }

  virtual StrategyState initial_state(RandomStream& shared_rng) const = 0;

  /// Default: memoryless, the state is returned unchanged.
  virtual StrategyState between_rounds(StrategyState state, std::span<const RoundRecord> history,
                                       RandomStream& shared_rng) const;

  /// The response table committed for the next round, for classical
  /// strategies. Entangled and signaling strategies have none.
  virtual std::optional<CounterfactualTable> committed_table(const StrategyState& state) const;

  /// Runs the party's responder on a view restricted to that party.
  /// Throws std::logic_error on an uninitialized state or unknown party.
  Outcome respond(Party party, Setting setting, const StrategyState& state, RandomStream& rng,
                  QubitPort qubit = {}) const;

  /// Only signaling fixtures implement this. Throws StructuralViolation
  /// when enforcement is on, and for every non-signaling strategy.
  virtual Outcome respond_with_peer_setting(Party party, Setting setting, Setting other_setting,
                                            bool enforcement) const;

 protected:
  virtual Outcome respond_local(Setting setting, const PartyView& view,
                                RandomStream& rng) const = 0;
};

/// Strategies that commit to a counterfactual table each round. Alice's
/// local memory holds (x1, x2), Bob's holds (y1, y2).
class TableStrategy : public Strategy {
 public:
  std::optional<CounterfactualTable> committed_table(const StrategyState& state) const override;

 protected:
  Outcome respond_local(Setting setting, const PartyView& view, RandomStream& rng) const override;
  static void commit(StrategyState& state, const CounterfactualTable& table);
};

class DeterministicStrategy final : public TableStrategy {
 public:
  explicit DeterministicStrategy(CounterfactualTable table) : table_(table) {}

  std::string_view name() const override { return "deterministic"; }
  StrategyState initial_state(RandomStream& shared_rng) const override;
  const CounterfactualTable& table() const { return table_; }

 private:
  CounterfactualTable table_;
};

/// Shared randomness: a table is drawn from the shared stream before every
/// round with the given weights over the 16 table indices.
class MixtureStrategy final : public TableStrategy {
 public:
  /// Throws ConfigError unless weights is a probability vector.
  explicit MixtureStrategy(std::array<double, 16> weights);

  std::string_view name() const override { return "mixture"; }
  StrategyState initial_state(RandomStream& shared_rng) const override;
  StrategyState between_rounds(StrategyState state, std::span<const RoundRecord> history,
                               RandomStream& shared_rng) const override;

  /// Exact expected win probability under uniform settings.
  double expected_win_probability() const;

 private:
  CounterfactualTable draw(RandomStream& rng) const;
  std::array<double, 16> weights_;
};

/// Hook for history-driven table switching. The policy receives the shared
/// memory (empty at start) and the full history, may rewrite the memory,
/// and returns the table for the next round. It is called with an empty
/// history to produce the initial state.
using AdaptivePolicy =
    std::function<CounterfactualTable(Bytes& memory, std::span<const RoundRecord> history)>;

class AdaptiveStrategy final : public TableStrategy {
 public:
  AdaptiveStrategy(std::string name, AdaptivePolicy policy)
      : name_(std::move(name)), policy_(std::move(policy)) {}

  std::string_view name() const override { return name_; }
  StrategyState initial_state(RandomStream& shared_rng) const override;
  StrategyState between_rounds(StrategyState state, std::span<const RoundRecord> history,
                               RandomStream& shared_rng) const override;

 private:
  std::string name_;
  AdaptivePolicy policy_;
};

/// The eight tables that win three of the four pairs, by table index.
std::array<CounterfactualTable, 8> optimal_tables();

/// Cycles through optimal_tables() starting at `start`, advancing one
/// step after every lost round.
AdaptivePolicy switch_on_loss_policy(int start);

/// Plays the optimal table whose losing pair has been drawn least often
/// so far (ties go to the lower pair, then the lower table index).
AdaptivePolicy least_frequent_pair_policy();

/// Negative control: Alice always outputs +1 and Bob outputs +1 only at
/// pair 11, so every round is won. Needs the peer's setting.
class SignalingCheat final : public Strategy {
 public:
  std::string_view name() const override { return "signaling-cheat"; }
  bool signaling() const override { return true; }
  StrategyState initial_state(RandomStream& shared_rng) const override;
  Outcome respond_with_peer_setting(Party party, Setting setting, Setting other_setting,
                                    bool enforcement) const override;

 protected:
  Outcome respond_local(Setting setting, const PartyView& view, RandomStream& rng) const override;
};

Outcome signaling_cheat_respond(Party party, Setting setting, Setting other_setting,
                                bool enforcement);

/// Each party measures its half of a fresh phi_plus pair at the angle
/// chosen by its own setting.
class QuantumStrategy final : public Strategy {
 public:
  explicit QuantumStrategy(quantum::AngleQuadruple angles = quantum::optimal_angles())
      : angles_(angles) {}

  std::string_view name() const override { return "quantum"; }
  bool uses_entanglement() const override { return true; }
  StrategyState initial_state(RandomStream& shared_rng) const override;
  const quantum::AngleQuadruple& angles() const { return angles_; }

 protected:
  Outcome respond_local(Setting setting, const PartyView& view, RandomStream& rng) const override;

 private:
  quantum::AngleQuadruple angles_;
};

using StrategyFactory =
    std::function<std::unique_ptr<Strategy>(const std::map<std::string, std::string>& params)>;

class StrategyRegistry {
 public:
  /// Registry preloaded with the built-in strategies.
  static StrategyRegistry& global();

  void add(std::string name, StrategyFactory factory, bool signaling = false);
  bool contains(const std::string& name) const;
  bool is_signaling(const std::string& name) const;
  std::vector<std::string> names() const;

  /// Throws ConfigError for unknown names or invalid parameters.
  std::unique_ptr<Strategy> build(const StrategyDescriptor& descriptor) const;

 private:
  struct Entry {
    StrategyFactory factory;
    bool signaling = false;
  };
  std::map<std::string, Entry> entries_;
};

/// Builds a descriptor with the signaling flag taken from the registry.
StrategyDescriptor make_descriptor(std::string name,
                                   std::map<std::string, std::string> parameters = {});

std::unique_ptr<Strategy> build_strategy(const StrategyDescriptor& descriptor);

}  // namespace bell
