#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cheapsub {

/// Shortest decimal text that round-trips to the same double. NaN -> "nan".
std::string format_double(double x);

/// Quotes a CSV field if it contains a separator, quote or newline.
std::string csv_escape(std::string_view field);

/// Splits one CSV line (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace cheapsub
