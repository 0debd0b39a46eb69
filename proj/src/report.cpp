#include "bell/report.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "bell/errors.hpp"
#include "bell/text.hpp"

namespace bell::report {
namespace {

std::string party_name(Party p) { return p == Party::Alice ? "alice" : "bob"; }
int setting_number(Setting s) { return s == Setting::S1 ? 1 : 2; }

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string format_probability(double value, double ln_value) {
  if (value >= 1e-300) return text::format_double(value);
  const double log10_value = ln_value / std::numbers::ln10;
  char buf[64];
  std::snprintf(buf, sizeof buf, "10^%.3f", log10_value);
  return buf;
}

nlohmann::json to_json(const stats::TestReport& r) {
  return {{"rounds", r.rounds},
          {"wins", r.wins},
          {"rate", r.rate},
          {"p0", r.p0},
          {"p_value_exact", r.p_value_exact},
          {"ln_p_value_exact", r.ln_p_value_exact},
          {"p_value_azuma", r.p_value_azuma},
          {"ln_p_value_azuma", r.ln_p_value_azuma},
          {"reject_at", r.reject_at}};
}

nlohmann::json to_json(const stats::PowerReport& r) {
  nlohmann::json j = {{"assumed_rate", r.assumed_rate},
                      {"alpha", r.alpha},
                      {"p0", r.p0},
                      {"search_cap", r.search_cap},
                      {"required_n_normal_approx", r.required_n_normal_approx}};
  if (r.required_n_exact) {
    j["required_n_exact"] = *r.required_n_exact;
  } else {
    j["required_n_exact"] = "infeasible";
  }
  return j;
}

nlohmann::json to_json(const stats::NoSignalingReport& r) {
  nlohmann::json comparisons = nlohmann::json::array();
  for (const auto& c : r.comparisons) {
    comparisons.push_back({{"party", party_name(c.party)},
                           {"own_setting", setting_number(c.own_setting)},
                           {"n_other_s1", c.n_other_s1},
                           {"n_other_s2", c.n_other_s2},
                           {"p_plus_other_s1", c.p_plus_other_s1},
                           {"p_plus_other_s2", c.p_plus_other_s2},
                           {"discrepancy", c.discrepancy},
                           {"z_score", c.z_score}});
  }
  return {{"status", r.sufficient_data ? "ok" : "insufficient data"},
          {"min_pair_count", r.min_pair_count},
          {"max_discrepancy", r.max_discrepancy},
          {"max_z_score", r.max_z_score},
          {"comparisons", comparisons}};
}

nlohmann::json to_json(const AuditReport& r) {
  return {{"verdict", r.passed() ? "PASS" : "FAIL"},
          {"light_time_ns", r.light_time_ns},
          {"rounds_checked", r.rounds_checked},
          {"violating_rounds", r.violating_rounds}};
}

nlohmann::json enumeration_json() {
  nlohmann::json rows = nlohmann::json::array();
  int best = 0;
  for (const auto& v : enumerate_deterministic_strategies()) {
    rows.push_back({{"index", v.table.index()},
                    {"table", v.table.to_string()},
                    {"wins_of_4", v.win_probability.quarters},
                    {"win_probability", std::to_string(v.win_probability.quarters) + "/4"}});
    best = std::max(best, v.win_probability.quarters);
  }
  return {{"strategies", rows}, {"max_win_probability", std::to_string(best) + "/4"}};
}

std::string to_text(const stats::TestReport& r) {
  std::string s = "test report\n";
  s += "  rounds            " + std::to_string(r.rounds) + "\n";
  s += "  wins              " + std::to_string(r.wins) + "\n";
  s += "  rate              " + fixed(r.rate, 6) + "\n";
  s += "  null bound p0     " + text::format_double(r.p0) + "\n";
  s += "  p_value_exact     " + format_probability(r.p_value_exact, r.ln_p_value_exact) + "\n";
  s += "  p_value_azuma     " + format_probability(r.p_value_azuma, r.ln_p_value_azuma) + "\n";
  s += "  reject_at        ";
  if (r.reject_at.empty()) s += " none";
  for (double a : r.reject_at) s += " " + text::format_double(a);
  s += "\n";
  return s;
}

std::string to_text(const stats::PowerReport& r) {
  std::string s = "power report\n";
  s += "  assumed_rate              " + text::format_double(r.assumed_rate) + "\n";
  s += "  alpha                     " + text::format_double(r.alpha) + "\n";
  s += "  required_n_exact          ";
  s += r.required_n_exact ? std::to_string(*r.required_n_exact)
                          : "infeasible (no n <= " + std::to_string(r.search_cap) + ")";
  s += "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", r.required_n_normal_approx);
  s += "  required_n_normal_approx  " + std::string(buf) + " (normal approximation)\n";
  return s;
}

std::string to_text(const stats::NoSignalingReport& r) {
  std::string s = "no-signaling check\n";
  if (!r.sufficient_data) {
    s += "  status  insufficient data (min pair count " + std::to_string(r.min_pair_count) + ")\n";
    return s;
  }
  for (const auto& c : r.comparisons) {
    s += "  " + party_name(c.party) + " setting " + std::to_string(setting_number(c.own_setting)) +
         ": P(+1|other=1)=" + fixed(c.p_plus_other_s1, 4) +
         " P(+1|other=2)=" + fixed(c.p_plus_other_s2, 4) + " z=" + fixed(c.z_score, 3) + "\n";
  }
  s += "  max discrepancy  " + fixed(r.max_discrepancy, 6) + "\n";
  s += "  max z-score      " + fixed(r.max_z_score, 3) + "\n";
  return s;
}

std::string to_text(const AuditReport& r) {
  std::string s = "spacetime audit\n";
  s += "  verdict          " + std::string(r.passed() ? "PASS" : "FAIL") + "\n";
  s += "  light time (ns)  " + fixed(r.light_time_ns, 3) + "\n";
  s += "  rounds checked   " + std::to_string(r.rounds_checked) + "\n";
  s += "  violations       " + std::to_string(r.violating_rounds.size());
  const std::size_t shown = std::min<std::size_t>(r.violating_rounds.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) s += (i ? "," : " [") + std::to_string(r.violating_rounds[i]);
  if (shown) s += shown < r.violating_rounds.size() ? ",...]" : "]";
  s += "\n";
  return s;
}

std::string enumeration_text() {
  std::string s = "index\tx1,x2,y1,y2\twins_of_4\twin_probability\n";
  int best = 0;
  for (const auto& v : enumerate_deterministic_strategies()) {
    s += std::to_string(v.table.index()) + "\t" + v.table.to_string() + "\t" +
         std::to_string(v.win_probability.quarters) + "\t" +
         std::to_string(v.win_probability.quarters) + "/4\n";
    best = std::max(best, v.win_probability.quarters);
  }
  s += "max\t\t" + std::to_string(best) + "\t" + std::to_string(best) + "/4\n";
  return s;
}

AuditOutcome try_audit(const ExperimentLog& log) {
  try {
    return spacetime_audit(log);
  } catch (const AuditInapplicable& e) {
    return std::string(e.what());
  }
}

}  // namespace bell::report
