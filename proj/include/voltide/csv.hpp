#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace voltide::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; throws DataError when absent.
    [[nodiscard]] std::size_t column(const std::string& name) const;
};

/// Reads a comma-separated file with a header row. No quoting support;
/// the ingestion schema has none. Handles trailing CR and a trailing newline.
Table read_table(const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double (to_chars).
std::string format_double(double v);

/// Parses a decimal number; throws DataError naming `context` on failure.
double parse_double(const std::string& s, const std::string& context);

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines);

}  // namespace voltide::csv
