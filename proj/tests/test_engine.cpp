#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "bell/engine.hpp"
#include "bell/errors.hpp"
#include "bell/io.hpp"

using namespace bell;

namespace {

const Outcome P = Outcome::plus();
const Outcome M = Outcome::minus();
const double kTsirelson = (2.0 + std::numbers::sqrt2) / 4.0;

ExperimentConfig config_for(StrategyDescriptor d, std::uint64_t rounds, std::uint64_t seed) {
  ExperimentConfig c;
  c.rounds = rounds;
  c.seed = seed;
  c.strategy = std::move(d);
  return c;
}

StrategyDescriptor best_deterministic() {
  return make_descriptor("deterministic", {{"table", "+1,+1,+1,-1"}});
}

/// 1300 m apart, both settings issued at the round start.
LabGeometry audit_geometry(std::int64_t latency_a, std::int64_t latency_b) {
  LabGeometry g;
  g.separation_m = 1300.0;
  g.response_latency_a_ns = latency_a;
  g.response_latency_b_ns = latency_b;
  return g;
}

}  // namespace

TEST_SUITE("engine") {
  TEST_CASE("uniform settings: each pair near 1/4 over 1e6 draws") {
    RandomStream rng(2025);
    std::array<int, 4> counts{};
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) ++counts[draw_settings(rng).index()];
    for (int c : counts) CHECK(std::abs(double(c) / n - 0.25) <= 0.0015);
  }

  TEST_CASE("the two settings are independent coins") {
    RandomStream rng(9);
    const int n = 400'000;
    int a2 = 0, b2 = 0, both = 0;
    for (int i = 0; i < n; ++i) {
      const auto p = draw_settings(rng);
      a2 += p.a == Setting::S2;
      b2 += p.b == Setting::S2;
      both += p.a == Setting::S2 && p.b == Setting::S2;
    }
    const double cov = double(both) / n - (double(a2) / n) * (double(b2) / n);
    CHECK(std::abs(cov) < 4 * 0.25 / std::sqrt(double(n)));
  }

  TEST_CASE("point mass and non-uniform distributions") {
    RandomStream rng(1);
    const auto only11 = SettingDistribution::point_mass({Setting::S1, Setting::S1});
    for (int i = 0; i < 1000; ++i) REQUIRE(draw_settings(rng, only11).index() == 0);

    SettingDistribution skew({0.1, 0.2, 0.3, 0.4});
    std::array<int, 4> counts{};
    const int n = 200'000;
    for (int i = 0; i < n; ++i) ++counts[draw_settings(rng, skew).index()];
    for (int k = 0; k < 4; ++k) {
      const double p = skew.probabilities()[k];
      CHECK(std::abs(double(counts[k]) / n - p) <= 4 * std::sqrt(p * (1 - p) / n));
    }
  }

  TEST_CASE("fixed seed replays the same settings") {
    RandomStream a(31), b(31);
    for (int i = 0; i < 1000; ++i) REQUIRE(draw_settings(a) == draw_settings(b));
  }

  TEST_CASE("settings stream does not depend on the strategy") {
    const auto det = run_experiment(config_for(best_deterministic(), 500, 12));
    const auto q = run_experiment(config_for(make_descriptor("quantum"), 500, 12));
    const auto mix = run_experiment(config_for(make_descriptor("mixture"), 500, 12));
    for (std::size_t i = 0; i < 500; ++i) {
      REQUIRE(det.records[i].pair == q.records[i].pair);
      REQUIRE(det.records[i].pair == mix.records[i].pair);
    }
  }

  TEST_CASE("play_round with a deterministic table") {
    const auto s = build_strategy(best_deterministic());
    RunStreams streams(1);
    const auto state = s->initial_state(streams.shared);
    const auto r = play_round(*s, state, {Setting::S2, Setting::S1}, streams, 7);
    CHECK(r.index == 7);
    CHECK(r.x == P);
    CHECK(r.y == P);
    CHECK_FALSE(r.win);
    CHECK_FALSE(r.events.has_value());
  }

  TEST_CASE("play_round with the quantum strategy at pair 11") {
    const auto s = build_strategy(make_descriptor("quantum"));
    RunStreams streams(3);
    const auto state = s->initial_state(streams.shared);
    const int n = 100'000;
    int wins = 0;
    for (int i = 0; i < n; ++i) {
      const auto r = play_round(*s, state, {Setting::S1, Setting::S1}, streams, std::uint64_t(i));
      REQUIRE(r.win == win_rule(r.pair, r.x, r.y));
      wins += r.win;
    }
    CHECK(std::abs(double(wins) / n - kTsirelson) <= 0.0034);
  }

  TEST_CASE("signaling strategy is refused with enforcement on") {
    const auto s = build_strategy(make_descriptor("signaling-cheat"));
    RunStreams streams(1);
    const auto state = s->initial_state(streams.shared);
    CHECK_THROWS_AS(play_round(*s, state, {Setting::S1, Setting::S2}, streams, 0, {true, nullptr}),
                    StructuralViolation);
    const auto r = play_round(*s, state, {Setting::S1, Setting::S2}, streams, 0, {false, nullptr});
    CHECK(r.win);

    auto c = config_for(make_descriptor("signaling-cheat"), 1000, 5);
    CHECK_THROWS_AS(run_experiment(c), StructuralViolation);
    c.enforcement = false;
    const auto log = run_experiment(c);
    CHECK(log.summary.wins == 1000);
  }

  TEST_CASE("N=4 all-plus table wins exactly at pair 11") {
    const auto log = run_experiment(
        config_for(make_descriptor("deterministic", {{"table", "+1,+1,+1,+1"}}), 4, 2024));
    REQUIRE(log.records.size() == 4);
    for (const auto& r : log.records) CHECK(r.win == (r.pair.index() == 0));
  }

  TEST_CASE("run_experiment Monte Carlo bands at N=1e5") {
    const auto q = run_experiment(config_for(make_descriptor("quantum"), 100'000, 41));
    CHECK(std::abs(q.summary.win_rate() - kTsirelson) <= 0.0034);
    const auto d = run_experiment(config_for(best_deterministic(), 100'000, 42));
    CHECK(std::abs(d.summary.win_rate() - 0.75) <= 0.0041);
  }

  TEST_CASE("log invariants") {
    const auto log = run_experiment(config_for(make_descriptor("adaptive-switch"), 5000, 8));
    CHECK(log.records.size() == 5000);
    std::uint64_t total = 0;
    for (auto c : log.summary.pair_counts) total += c;
    CHECK(total == 5000);
    CHECK(log.summary == ExperimentSummary::from_records(log.records));
    for (std::size_t i = 0; i < log.records.size(); ++i) {
      CHECK(log.records[i].index == i);
      CHECK(log.records[i].win == win_rule(log.records[i].pair, log.records[i].x, log.records[i].y));
    }
  }

  TEST_CASE("identical config and seed give byte-identical logs") {
    for (const char* name : {"quantum", "mixture", "adaptive-switch", "adaptive-frequency"}) {
      CAPTURE(name);
      auto c = config_for(make_descriptor(name), 2000, 99);
      c.geometry = audit_geometry(3000, 3000);
      CHECK(io::serialize_log(run_experiment(c)) == io::serialize_log(run_experiment(c)));
      auto other = c;
      other.seed = 100;
      CHECK(io::serialize_log(run_experiment(c)) != io::serialize_log(run_experiment(other)));
    }
  }

  TEST_CASE("between_rounds sees the full history after every round") {
    std::vector<std::size_t> lengths;
    StrategyRegistry::global().add("history-probe", [&lengths](const auto&) {
      return std::make_unique<AdaptiveStrategy>(
          "history-probe", [&lengths](Bytes&, std::span<const RoundRecord> history) {
            if (!history.empty()) {
              lengths.push_back(history.size());
              for (std::size_t i = 0; i < history.size(); ++i) REQUIRE(history[i].index == i);
            }
            return CounterfactualTable::from_index(1);
          });
    });
    run_experiment(config_for(make_descriptor("history-probe"), 50, 1));
    REQUIRE(lengths.size() == 50);
    for (std::size_t i = 0; i < 50; ++i) CHECK(lengths[i] == i + 1);
  }

  TEST_CASE("errors inside the round loop abort with the partial log") {
    StrategyRegistry::global().add("fails-at-10", [](const auto&) {
      return std::make_unique<AdaptiveStrategy>(
          "fails-at-10", [](Bytes&, std::span<const RoundRecord> history) {
            if (history.size() == 10) throw std::runtime_error("boom");
            return CounterfactualTable::from_index(1);
          });
    });
    try {
      run_experiment(config_for(make_descriptor("fails-at-10"), 100, 1));
      FAIL("expected ExperimentAborted");
    } catch (const ExperimentAborted& e) {
      CHECK(e.partial().records.size() == 10);
      CHECK(e.partial().summary.rounds() == 10);
      CHECK_THROWS_AS(std::rethrow_exception(e.cause()), std::runtime_error);
    }
  }

  TEST_CASE("config validation") {
    auto c = config_for(best_deterministic(), 10, 1);
    c.rounds = 0;
    CHECK_THROWS_AS(run_experiment(c), ConfigError);
    c.rounds = 10;
    c.strategy = make_descriptor("nope");
    CHECK_THROWS_AS(run_experiment(c), ConfigError);
    c.strategy = best_deterministic();
    LabGeometry g;
    g.separation_m = 10;
    g.signal_speed_mps = 0;
    c.geometry = g;
    CHECK_THROWS_AS(run_experiment(c), ConfigError);
  }

  TEST_CASE("conditional win frequency stays under 3/4 in every history bucket") {
    // bucket = (previous pair, previous win)
    for (const char* name : {"deterministic", "mixture", "adaptive-switch", "adaptive-frequency"}) {
      CAPTURE(name);
      const auto d = std::string(name) == "deterministic" ? best_deterministic() : make_descriptor(name);
      const auto log = run_experiment(config_for(d, 200'000, 314));
      std::map<std::pair<int, bool>, std::pair<std::uint64_t, std::uint64_t>> buckets;
      for (std::size_t i = 1; i < log.records.size(); ++i) {
        auto& b = buckets[{log.records[i - 1].pair.index(), log.records[i - 1].win}];
        ++b.first;
        b.second += log.records[i].win;
      }
      for (const auto& [key, counts] : buckets) {
        const double n = double(counts.first);
        CHECK(double(counts.second) / n <= 0.75 + 3 * std::sqrt(0.75 * 0.25 / n));
      }
    }
  }

  TEST_CASE("event times follow the geometry") {
    LabGeometry g = audit_geometry(3000, 2500);
    g.round_period_ns = 10'000;
    g.setting_delay_b_ns = 100;
    const auto t = g.stamp(3);
    CHECK(t.setting_issued_a == 30'000);
    CHECK(t.setting_issued_b == 30'100);
    CHECK(t.output_committed_a == 33'000);
    CHECK(t.output_committed_b == 32'600);
    CHECK(g.light_time_ns() == doctest::Approx(4336.333237575977).epsilon(1e-12));
  }

  TEST_CASE("spacetime audit: 3.0 us commits pass at 1300 m") {
    auto c = config_for(best_deterministic(), 100, 1);
    c.geometry = audit_geometry(3000, 3000);
    const auto report = spacetime_audit(run_experiment(c));
    CHECK(report.passed());
    CHECK(report.rounds_checked == 100);
  }

  TEST_CASE("spacetime audit: a 5.0 us commit fails that round only") {
    auto c = config_for(best_deterministic(), 20, 1);
    c.geometry = audit_geometry(3000, 3000);
    auto log = run_experiment(c);
    auto& ev = *log.records[7].events;
    ev.output_committed_a = ev.setting_issued_b + 5000;
    const auto report = spacetime_audit(log);
    CHECK_FALSE(report.passed());
    CHECK(report.violating_rounds == std::vector<std::uint64_t>{7});
  }

  TEST_CASE("spacetime audit: Alice too slow fails every round") {
    auto c = config_for(best_deterministic(), 50, 1);
    c.geometry = audit_geometry(5000, 3000);
    const auto report = spacetime_audit(run_experiment(c));
    CHECK(report.violating_rounds.size() == 50);
  }

  TEST_CASE("spacetime audit: zero separation fails every round") {
    auto c = config_for(best_deterministic(), 30, 1);
    c.geometry = audit_geometry(1, 1);
    c.geometry->separation_m = 0.0;
    const auto report = spacetime_audit(run_experiment(c));
    CHECK(report.light_time_ns == 0.0);
    CHECK(report.violating_rounds.size() == 30);
  }

  TEST_CASE("spacetime audit needs geometry and timestamps") {
    auto log = run_experiment(config_for(best_deterministic(), 10, 1));
    CHECK_THROWS_AS(spacetime_audit(log), AuditInapplicable);
    log.config.geometry = audit_geometry(1, 1);
    CHECK_THROWS_AS(spacetime_audit(log), AuditInapplicable);
  }
}
