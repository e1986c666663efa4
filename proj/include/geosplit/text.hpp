#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geosplit {

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int64(std::string_view s);

/// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
/// Returns nullopt on an unterminated quote.
std::optional<std::vector<std::string>> split_csv_record(std::string_view line);

/// Quotes a field if it contains a comma, quote, or line break.
std::string csv_field(std::string_view s);

std::vector<std::string> split_list(std::string_view s, char sep = ',');

}  // namespace geosplit
