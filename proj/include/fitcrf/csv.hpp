#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace fitcrf {

// Minimal CSV support for the artifact's file formats. None of the schemas
// use quoting or embedded separators. Doubles are printed with
// std::to_chars (shortest round-trip form) and parsed with std::from_chars,
// so a write/read cycle is bit-exact and locale-independent.

std::string format_double(double v);
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;  // throws IoError if absent
};

CsvTable read_csv(const std::filesystem::path& path);

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path);

    CsvWriter& field(std::string_view s);
    CsvWriter& field(double v);
    CsvWriter& field(long long v);
    CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
    CsvWriter& field(std::size_t v) { return field(static_cast<long long>(v)); }
    void end_row();

private:
    std::ofstream out_;
    bool row_started_ = false;
};

}  // namespace fitcrf
