#pragma once

// Locale-independent number formatting and parsing. Doubles are written
// as the shortest decimal that round-trips.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bell::text {

std::string format_double(double value);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<std::uint64_t> parse_uint(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char delim);

}  // namespace bell::text
