#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ppkg::io {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double x);

/// RFC 4180 quoting when the field contains a comma, quote or line break.
std::string csv_field(std::string_view s);

/// Parses RFC 4180 CSV into rows of fields. Trailing newline optional.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace ppkg::io
