#pragma once

// Exact two-qubit state-vector simulation. Measurements are spin
// observables cos(t) Z + sin(t) X in the x-z plane of the Bloch sphere;
// outcome +1 is the spin-up eigenstate along the measurement direction.

#include <array>
#include <complex>
#include <utility>

#include "bell/core.hpp"
#include "bell/random.hpp"

namespace bell::quantum {

using Amplitude = std::complex<double>;

/// Amplitudes over |00>, |01>, |10>, |11>; Alice holds the first qubit.
struct TwoQubitState {
  std::array<Amplitude, 4> amplitudes{};

  double norm_squared() const;
};

/// Maximally entangled (|00> + |11>) / sqrt(2).
TwoQubitState phi_plus();

/// Rejects states whose squared norm deviates from 1 by more than 1e-9.
void require_normalized(const TwoQubitState& state);

/// Measurement direction, canonicalized to (-pi, pi].
class MeasurementAngle {
 public:
  constexpr MeasurementAngle() = default;
  /// Throws std::invalid_argument for non-finite input.
  MeasurementAngle(double radians);  // NOLINT(google-explicit-constructor)

  double radians() const { return radians_; }
  bool operator==(const MeasurementAngle&) const = default;

 private:
  double radians_ = 0.0;
};

struct AngleQuadruple {
  MeasurementAngle alice1, alice2, bob1, bob2;

  MeasurementAngle alice(Setting s) const { return s == Setting::S1 ? alice1 : alice2; }
  MeasurementAngle bob(Setting s) const { return s == Setting::S1 ? bob1 : bob2; }
  bool operator==(const AngleQuadruple&) const = default;
};

/// Outcome probabilities ordered (+1,+1), (+1,-1), (-1,+1), (-1,-1).
struct JointDistribution {
  std::array<double, 4> probs{};

  double operator()(Outcome x, Outcome y) const {
    return probs[(x == Outcome::plus() ? 0 : 2) + (y == Outcome::plus() ? 0 : 1)];
  }
  double p_equal() const { return probs[0] + probs[3]; }
  double p_alice_plus() const { return probs[0] + probs[1]; }
  double p_bob_plus() const { return probs[0] + probs[2]; }
};

JointDistribution joint_distribution(const TwoQubitState& state, MeasurementAngle alpha,
                                     MeasurementAngle beta);

/// E[x y] under the joint distribution.
double correlation(const TwoQubitState& state, MeasurementAngle alpha, MeasurementAngle beta);

/// Alice: 0, pi/2. Bob: -pi/4, -3pi/4.
AngleQuadruple optimal_angles();

/// Probability that the game is won at one setting pair.
double win_probability(const TwoQubitState& state, const AngleQuadruple& angles,
                       SettingPair pair);

double average_win_probability(const TwoQubitState& state, const AngleQuadruple& angles,
                               const SettingDistribution& dist = SettingDistribution::uniform());

/// Joint draw of both outcomes from one uniform variate.
std::pair<Outcome, Outcome> sample_outcomes(const TwoQubitState& state, MeasurementAngle alpha,
                                            MeasurementAngle beta, RandomStream& rng);

/// Measures one party's qubit and returns the outcome with the collapsed,
/// renormalized state.
std::pair<Outcome, TwoQubitState> measure_qubit(const TwoQubitState& state, Party party,
                                                MeasurementAngle angle, RandomStream& rng);

/// A freshly prepared pair for a single round. Each side may be measured
/// once; the other side then sees the collapsed state.
class EntangledPair {
 public:
  explicit EntangledPair(TwoQubitState state);

  Outcome measure(Party party, MeasurementAngle angle, RandomStream& rng);
  const TwoQubitState& state() const { return state_; }

 private:
  TwoQubitState state_;
  std::array<bool, 2> measured_{false, false};
};

}  // namespace bell::quantum
