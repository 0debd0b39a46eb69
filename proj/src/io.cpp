#include "bell/io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "bell/errors.hpp"
#include "bell/text.hpp"

namespace bell::io {
namespace {

constexpr std::string_view kColumns = "index,a,b,x,y,win";
constexpr std::string_view kTimeColumns =
    ",setting_issued_a,setting_issued_b,output_committed_a,output_committed_b";

struct Entry {
  std::size_t line;
  std::string key;
  std::string value;
};

double need_double(const Entry& e) {
  auto v = text::parse_double(e.value);
  if (!v) throw ParseError(e.line, "expected a number for " + e.key + ", got '" + e.value + "'");
  return *v;
}

std::uint64_t need_uint(const Entry& e) {
  auto v = text::parse_uint(e.value);
  if (!v) {
    throw ParseError(e.line, "expected a nonnegative integer for " + e.key + ", got '" + e.value + "'");
  }
  return *v;
}

std::int64_t need_int(const Entry& e) {
  auto v = text::parse_int(e.value);
  if (!v) throw ParseError(e.line, "expected an integer for " + e.key + ", got '" + e.value + "'");
  return *v;
}

bool need_bool(const Entry& e) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  throw ParseError(e.line, "expected true or false for " + e.key + ", got '" + e.value + "'");
}

SettingDistribution need_distribution(const Entry& e) {
  if (e.value == "uniform") return SettingDistribution::uniform();
  const auto parts = text::split(e.value, ',');
  if (parts.size() != 4) throw ParseError(e.line, "distribution needs four probabilities");
  std::array<double, 4> p{};
  for (std::size_t i = 0; i < 4; ++i) {
    auto v = text::parse_double(parts[i]);
    if (!v) throw ParseError(e.line, "bad probability '" + std::string(parts[i]) + "'");
    p[i] = *v;
  }
  try {
    return SettingDistribution(p);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("distribution: ") + err.what());
  }
}

/// Builds a config from key/value entries. Strategy names are checked
/// against the registry only when `validate` is set.
ExperimentConfig config_from_entries(const std::vector<Entry>& entries, bool validate) {
  ExperimentConfig c;
  c.rounds = 1000;
  bool have_seed = false;
  bool have_strategy = false;
  bool have_separation = false;
  std::set<std::string> seen;
  LabGeometry geometry;
  bool have_geometry = false;

  for (const auto& e : entries) {
    if (!seen.insert(e.key).second) throw ParseError(e.line, "duplicate key " + e.key);
    if (e.key == "rounds") {
      auto v = text::parse_int(e.value);
      if (!v) throw ParseError(e.line, "expected an integer for rounds, got '" + e.value + "'");
      if (*v < 1) throw ConfigError("rounds must be >= 1, got " + e.value);
      c.rounds = static_cast<std::uint64_t>(*v);
    } else if (e.key == "seed") {
      c.seed = need_uint(e);
      have_seed = true;
    } else if (e.key == "strategy.name") {
      c.strategy.name = e.value;
      have_strategy = true;
    } else if (e.key.starts_with("strategy.params.")) {
      const auto name = e.key.substr(std::string_view("strategy.params.").size());
      if (name.empty()) throw ParseError(e.line, "empty strategy parameter name");
      c.strategy.parameters[name] = e.value;
    } else if (e.key == "enforcement") {
      c.enforcement = need_bool(e);
    } else if (e.key == "distribution") {
      c.distribution = need_distribution(e);
    } else if (e.key.starts_with("geometry.")) {
      have_geometry = true;
      const auto field = e.key.substr(std::string_view("geometry.").size());
      if (field == "separation_m") {
        geometry.separation_m = need_double(e);
        have_separation = true;
      } else if (field == "signal_speed_mps") {
        geometry.signal_speed_mps = need_double(e);
      } else if (field == "round_period_ns") {
        geometry.round_period_ns = need_int(e);
      } else if (field == "setting_delay_a_ns") {
        geometry.setting_delay_a_ns = need_int(e);
      } else if (field == "setting_delay_b_ns") {
        geometry.setting_delay_b_ns = need_int(e);
      } else if (field == "response_latency_a_ns") {
        geometry.response_latency_a_ns = need_int(e);
      } else if (field == "response_latency_b_ns") {
        geometry.response_latency_b_ns = need_int(e);
      } else {
        throw ParseError(e.line, "unknown key " + e.key);
      }
    } else {
      throw ParseError(e.line, "unknown key " + e.key);
    }
  }

  if (!have_seed) throw ConfigError("seed is required");
  if (!have_strategy) throw ConfigError("strategy.name is required");
  if (have_geometry) {
    if (!have_separation) throw ConfigError("geometry.separation_m is required with geometry");
    geometry.validate();
    c.geometry = geometry;
  }
  c.strategy.signaling = StrategyRegistry::global().is_signaling(c.strategy.name);
  if (validate) c.validate();
  return c;
}

std::vector<std::pair<std::string, std::string>> config_pairs(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("rounds", std::to_string(c.rounds));
  out.emplace_back("seed", std::to_string(c.seed));
  out.emplace_back("strategy.name", c.strategy.name);
  for (const auto& [k, v] : c.strategy.parameters) out.emplace_back("strategy.params." + k, v);
  out.emplace_back("enforcement", c.enforcement ? "true" : "false");
  std::string dist;
  for (double p : c.distribution.probabilities()) {
    if (!dist.empty()) dist += ',';
    dist += text::format_double(p);
  }
  out.emplace_back("distribution", dist);
  if (c.geometry) {
    const auto& g = *c.geometry;
    out.emplace_back("geometry.separation_m", text::format_double(g.separation_m));
    out.emplace_back("geometry.signal_speed_mps", text::format_double(g.signal_speed_mps));
    out.emplace_back("geometry.round_period_ns", std::to_string(g.round_period_ns));
    out.emplace_back("geometry.setting_delay_a_ns", std::to_string(g.setting_delay_a_ns));
    out.emplace_back("geometry.setting_delay_b_ns", std::to_string(g.setting_delay_b_ns));
    out.emplace_back("geometry.response_latency_a_ns", std::to_string(g.response_latency_a_ns));
    out.emplace_back("geometry.response_latency_b_ns", std::to_string(g.response_latency_b_ns));
  }
  return out;
}

std::string join_counts(const std::array<std::uint64_t, 4>& counts) {
  std::string s;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(counts[i]);
  }
  return s;
}

std::array<std::uint64_t, 4> parse_counts(const Entry& e) {
  const auto parts = text::split(e.value, ',');
  if (parts.size() != 4) throw ParseError(e.line, e.key + " needs four counts");
  std::array<std::uint64_t, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    auto v = text::parse_uint(parts[i]);
    if (!v) throw ParseError(e.line, "bad count '" + std::string(parts[i]) + "'");
    out[i] = *v;
  }
  return out;
}

/// Iterates lines with 1-based numbers; a trailing newline does not start
/// an extra line.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

Setting parse_setting(std::string_view s, std::size_t line) {
  if (s == "1") return Setting::S1;
  if (s == "2") return Setting::S2;
  throw ParseError(line, "setting must be 1 or 2, got '" + std::string(s) + "'");
}

Outcome parse_outcome(std::string_view s, std::size_t line) {
  if (s == "+1" || s == "1") return Outcome::plus();
  if (s == "-1") return Outcome::minus();
  throw ParseError(line, "outcome must be +1 or -1, got '" + std::string(s) + "'");
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  std::vector<Entry> entries;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = lines[i];
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(i + 1, "expected key = value");
    Entry e{i + 1, std::string(text::trim(line.substr(0, eq))),
            std::string(text::trim(line.substr(eq + 1)))};
    if (e.key.empty()) throw ParseError(i + 1, "empty key");
    entries.push_back(std::move(e));
  }
  return config_from_entries(entries, true);
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

std::string format_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [k, v] : config_pairs(config)) out += k + " = " + v + "\n";
  return out;
}

std::string serialize_log(const ExperimentLog& log) {
  std::string out;
  const bool timed = log.has_timestamps();
  out.reserve(128 + log.records.size() * (timed ? 64 : 16));
  out += kLogMagic;
  out += '\n';
  for (const auto& [k, v] : config_pairs(log.config)) out += "#" + k + "=" + v + "\n";
  const auto s = ExperimentSummary::from_records(log.records);
  out += "#summary.wins=" + std::to_string(s.wins) + "\n";
  out += "#summary.losses=" + std::to_string(s.losses) + "\n";
  out += "#summary.pair_counts=" + join_counts(s.pair_counts) + "\n";
  out += "#summary.pair_wins=" + join_counts(s.pair_wins) + "\n";
  out += kColumns;
  if (timed) out += kTimeColumns;
  out += '\n';

  for (const auto& r : log.records) {
    out += std::to_string(r.index);
    out += r.pair.a == Setting::S1 ? ",1" : ",2";
    out += r.pair.b == Setting::S1 ? ",1" : ",2";
    out += r.x == Outcome::plus() ? ",+1" : ",-1";
    out += r.y == Outcome::plus() ? ",+1" : ",-1";
    out += r.win ? ",1" : ",0";
    if (timed) {
      const auto& t = *r.events;
      for (auto v : {t.setting_issued_a, t.setting_issued_b, t.output_committed_a,
                     t.output_committed_b}) {
        out += ',';
        out += std::to_string(v);
      }
    }
    out += '\n';
  }
  return out;
}

ExperimentLog parse_log(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != kLogMagic) {
    throw ParseError(1, "missing log header '" + std::string(kLogMagic) + "'");
  }

  std::vector<Entry> config_entries;
  std::vector<Entry> summary_entries;
  std::size_t i = 1;
  for (; i < lines.size() && lines[i].starts_with('#'); ++i) {
    const auto body = lines[i].substr(1);
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(i + 1, "expected #key=value");
    Entry e{i + 1, std::string(body.substr(0, eq)), std::string(body.substr(eq + 1))};
    (e.key.starts_with("summary.") ? summary_entries : config_entries).push_back(std::move(e));
  }

  ExperimentLog log;
  try {
    log.config = config_from_entries(config_entries, false);
  } catch (const ConfigError& e) {
    throw ParseError(0, std::string("log header: ") + e.what());
  }

  if (i >= lines.size()) throw ParseError(i + 1, "missing column line");
  bool timed = false;
  if (lines[i] == kColumns) {
    timed = false;
  } else if (lines[i] == std::string(kColumns) + std::string(kTimeColumns)) {
    timed = true;
  } else {
    throw ParseError(i + 1, "unexpected column line '" + std::string(lines[i]) + "'");
  }
  ++i;

  const std::size_t fields = timed ? 10 : 6;
  log.records.reserve(lines.size() - i);
  for (; i < lines.size(); ++i) {
    const std::size_t ln = i + 1;
    const auto parts = text::split(lines[i], ',');
    if (parts.size() != fields) {
      throw ParseError(ln, "expected " + std::to_string(fields) + " fields, got " +
                               std::to_string(parts.size()));
    }
    RoundRecord r;
    auto index = text::parse_uint(parts[0]);
    if (!index) throw ParseError(ln, "bad round index '" + std::string(parts[0]) + "'");
    r.index = *index;
    if (!log.records.empty() && r.index <= log.records.back().index) {
      throw ParseError(ln, "round indices must be strictly increasing");
    }
    r.pair = {parse_setting(parts[1], ln), parse_setting(parts[2], ln)};
    r.x = parse_outcome(parts[3], ln);
    r.y = parse_outcome(parts[4], ln);
    if (parts[5] == "1") {
      r.win = true;
    } else if (parts[5] == "0") {
      r.win = false;
    } else {
      throw ParseError(ln, "win must be 0 or 1, got '" + std::string(parts[5]) + "'");
    }
    if (r.win != win_rule(r.pair, r.x, r.y)) {
      throw ParseError(ln, "win flag disagrees with the win rule");
    }
    if (timed) {
      std::array<std::int64_t, 4> t{};
      for (std::size_t k = 0; k < 4; ++k) {
        auto v = text::parse_int(parts[6 + k]);
        if (!v) throw ParseError(ln, "bad timestamp '" + std::string(parts[6 + k]) + "'");
        t[k] = *v;
      }
      r.events = EventTimes{t[0], t[1], t[2], t[3]};
      if (t[2] < t[0] || t[3] < t[1]) {
        throw ParseError(ln, "output committed before its setting was issued");
      }
    }
    log.records.push_back(r);
  }

  if (log.records.size() != log.config.rounds) {
    throw ParseError(lines.size(), "header declares " + std::to_string(log.config.rounds) +
                                       " rounds but the log has " +
                                       std::to_string(log.records.size()));
  }

  log.summary = ExperimentSummary::from_records(log.records);
  for (const auto& e : summary_entries) {
    bool ok = true;
    if (e.key == "summary.wins") {
      ok = need_uint(e) == log.summary.wins;
    } else if (e.key == "summary.losses") {
      ok = need_uint(e) == log.summary.losses;
    } else if (e.key == "summary.pair_counts") {
      ok = parse_counts(e) == log.summary.pair_counts;
    } else if (e.key == "summary.pair_wins") {
      ok = parse_counts(e) == log.summary.pair_wins;
    } else {
      throw ParseError(e.line, "unknown key " + e.key);
    }
    if (!ok) throw ParseError(e.line, e.key + " does not match the records");
  }
  return log;
}

void write_log(const ExperimentLog& log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << serialize_log(log);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

ExperimentLog read_log(const std::filesystem::path& path) { return parse_log(read_file(path)); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bell::io
