#include "bell/quantum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bell::quantum {
namespace {

/// Real eigenvector of cos(t) Z + sin(t) X for the given outcome.
std::array<double, 2> eigenvector(MeasurementAngle angle, Outcome outcome) {
  const double half = angle.radians() / 2.0;
  if (outcome == Outcome::plus()) return {std::cos(half), std::sin(half)};
  return {-std::sin(half), std::cos(half)};
}

}  // namespace

double TwoQubitState::norm_squared() const {
  double n = 0.0;
  for (const auto& a : amplitudes) n += std::norm(a);
  return n;
}

TwoQubitState phi_plus() {
  const double r = 1.0 / std::numbers::sqrt2;
  return {{Amplitude{r}, Amplitude{0.0}, Amplitude{0.0}, Amplitude{r}}};
}

void require_normalized(const TwoQubitState& state) {
  const double n = state.norm_squared();
  if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-9) {
    throw std::invalid_argument("two-qubit state is not normalized");
  }
}

MeasurementAngle::MeasurementAngle(double radians) {
  if (!std::isfinite(radians)) throw std::invalid_argument("measurement angle must be finite");
  double r = std::remainder(radians, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  radians_ = r;
}

JointDistribution joint_distribution(const TwoQubitState& state, MeasurementAngle alpha,
                                     MeasurementAngle beta) {
  require_normalized(state);
  JointDistribution out;
  const auto& psi = state.amplitudes;
  int k = 0;
  for (Outcome x : {Outcome::plus(), Outcome::minus()}) {
    const auto u = eigenvector(alpha, x);
    for (Outcome y : {Outcome::plus(), Outcome::minus()}) {
      const auto v = eigenvector(beta, y);
      const Amplitude amp = u[0] * v[0] * psi[0] + u[0] * v[1] * psi[1] +
                            u[1] * v[0] * psi[2] + u[1] * v[1] * psi[3];
      out.probs[k++] = std::norm(amp);
    }
  }
  // The four projectors sum to the identity, so this only removes the
  // input's (tolerated) norm deviation.
  const double total = out.probs[0] + out.probs[1] + out.probs[2] + out.probs[3];
  for (double& p : out.probs) p /= total;
  return out;
}

double correlation(const TwoQubitState& state, MeasurementAngle alpha, MeasurementAngle beta) {
  const auto d = joint_distribution(state, alpha, beta);
  return d.probs[0] - d.probs[1] - d.probs[2] + d.probs[3];
}

AngleQuadruple optimal_angles() {
  using std::numbers::pi;
  return {0.0, pi / 2.0, -pi / 4.0, -3.0 * pi / 4.0};
}

double win_probability(const TwoQubitState& state, const AngleQuadruple& angles,
                       SettingPair pair) {
  const double same = joint_distribution(state, angles.alice(pair.a), angles.bob(pair.b)).p_equal();
  return pair.index() == 0 ? same : 1.0 - same;
}

double average_win_probability(const TwoQubitState& state, const AngleQuadruple& angles,
                               const SettingDistribution& dist) {
  double w = 0.0;
  for (SettingPair pair : kAllPairs) w += dist[pair] * win_probability(state, angles, pair);
  return w;
}

std::pair<Outcome, Outcome> sample_outcomes(const TwoQubitState& state, MeasurementAngle alpha,
                                            MeasurementAngle beta, RandomStream& rng) {
  const auto d = joint_distribution(state, alpha, beta);
  const double u = rng.uniform();
  double acc = 0.0;
  int k = 0;
  for (; k < 3; ++k) {
    acc += d.probs[k];
    if (u < acc) break;
  }
  // k == 3 also catches u landing in the rounding gap above the last sum.
  const Outcome x = k < 2 ? Outcome::plus() : Outcome::minus();
  const Outcome y = (k & 1) == 0 ? Outcome::plus() : Outcome::minus();
  return {x, y};
}

std::pair<Outcome, TwoQubitState> measure_qubit(const TwoQubitState& state, Party party,
                                                MeasurementAngle angle, RandomStream& rng) {
  require_normalized(state);
  const auto& psi = state.amplitudes;
  // Basis index of (own bit, other bit).
  auto at = [party](int own, int other) {
    return party == Party::Alice ? 2 * own + other : 2 * other + own;
  };

  // Reduced amplitudes <u| psi for the other qubit's two basis states.
  auto project = [&](Outcome outcome) {
    const auto u = eigenvector(angle, outcome);
    return std::array<Amplitude, 2>{u[0] * psi[at(0, 0)] + u[1] * psi[at(1, 0)],
                                    u[0] * psi[at(0, 1)] + u[1] * psi[at(1, 1)]};
  };

  const auto up = project(Outcome::plus());
  const auto down = project(Outcome::minus());
  const double p_up = std::norm(up[0]) + std::norm(up[1]);
  const double p_down = std::norm(down[0]) + std::norm(down[1]);

  const Outcome result = rng.uniform() * (p_up + p_down) < p_up ? Outcome::plus() : Outcome::minus();
  const auto& reduced = result == Outcome::plus() ? up : down;
  const double scale = 1.0 / std::sqrt(result == Outcome::plus() ? p_up : p_down);
  const auto u = eigenvector(angle, result);

  TwoQubitState post;
  for (int own = 0; own < 2; ++own) {
    for (int other = 0; other < 2; ++other) {
      post.amplitudes[at(own, other)] = u[own] * reduced[other] * scale;
    }
  }
  return {result, post};
}

EntangledPair::EntangledPair(TwoQubitState state) : state_(state) { require_normalized(state_); }

Outcome EntangledPair::measure(Party party, MeasurementAngle angle, RandomStream& rng) {
  auto& done = measured_[party == Party::Alice ? 0 : 1];
  if (done) throw std::logic_error("qubit already measured this round");
  auto [outcome, post] = measure_qubit(state_, party, angle, rng);
  state_ = post;
  done = true;
  return outcome;
}

}  // namespace bell::quantum
