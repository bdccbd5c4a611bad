#pragma once

#include <string>
#include <vector>

namespace igflow::cli {

// Shortest round-trip-safe decimal form, 17 significant digits.
std::string format_number(double x);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    // Index of a header column, or -1.
    [[nodiscard]] int column(const std::string& name) const;
    [[nodiscard]] std::string to_string() const;
};

// Reads a numeric CSV with a header row. Throws ConfigError on malformed input.
CsvTable parse_csv(const std::string& text);
std::string read_file(const std::string& path);

// Writes content to path through a temporary sibling file and rename(), so a
// failed run never leaves a partial file behind.
void write_atomically(const std::string& path, const std::string& content);

}  // namespace igflow::cli
