#pragma once

// Text formats: the experiment config file and the round log.
//
// Config: one `key = value` per line, `#` starts a comment. Keys:
//   seed (required), strategy.name (required), rounds (default 1000),
//   strategy.params.<name>, enforcement (true|false, default true),
//   distribution (four comma-separated probabilities for 11,12,21,22,
//   default uniform), geometry.<field> (any geometry key enables the
//   geometry; separation_m is then required).
//
// Log, format version 1:
//   #bellgame-log 1
//   #<key>=<value>          config echo, canonical key order
//   #summary.<key>=<value>  wins, losses, pair_counts, pair_wins
//   index,a,b,x,y,win[,setting_issued_a,setting_issued_b,output_committed_a,output_committed_b]
//   one record per line: settings as 1|2, outcomes as +1|-1, win as 0|1,
//   times as integer nanoseconds.
// Doubles are written as the shortest decimal that round-trips.

#include <filesystem>
#include <string>
#include <string_view>

#include "bell/engine.hpp"

namespace bell::io {

inline constexpr std::string_view kLogMagic = "#bellgame-log 1";

/// Parses config text. Throws ParseError (bad syntax, unknown or duplicate
/// keys, bad values) and ConfigError (semantic validation).
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical `key = value` rendering; parse_config(format_config(c)) == c.
std::string format_config(const ExperimentConfig& config);

std::string serialize_log(const ExperimentLog& log);
/// Throws ParseError naming the offending line.
ExperimentLog parse_log(std::string_view text);

void write_log(const ExperimentLog& log, const std::filesystem::path& path);
ExperimentLog read_log(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace bell::io
