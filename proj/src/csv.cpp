#include "fitcrf/csv.hpp"

#include <charconv>
#include <system_error>

#include "fitcrf/error.hpp"

namespace fitcrf {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw IoError("double formatting failed");
    return std::string(buf, ptr);
}

double parse_double(std::string_view s) {
    double v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw IoError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

long long parse_int(std::string_view s) {
    long long v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw IoError("not an integer: '" + std::string(s) + "'");
    }
    return v;
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw IoError("missing CSV column: " + std::string(name));
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.emplace_back(line.substr(start));
            return out;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV: " + path.string());
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty CSV: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    table.header = split_line(line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (fields.size() != table.header.size()) {
            throw IoError("ragged CSV row in " + path.string());
        }
        table.rows.push_back(std::move(fields));
    }
    return table;
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw IoError("cannot open CSV for writing: " + path.string());
}

CsvWriter& CsvWriter::field(std::string_view s) {
    if (row_started_) out_ << ',';
    out_ << s;
    row_started_ = true;
    return *this;
}

CsvWriter& CsvWriter::field(double v) { return field(format_double(v)); }

CsvWriter& CsvWriter::field(long long v) { return field(std::to_string(v)); }

void CsvWriter::end_row() {
    out_ << '\n';
    row_started_ = false;
}

}  // namespace fitcrf
