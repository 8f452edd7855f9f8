#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace fitcrf {

/// Flat `key = value` configuration file. Lines starting with '#' and blank
/// lines are ignored; keys use dotted names (e.g. `truth.per_bpm`).
class Config {
public:
    Config() = default;

    static Config from_file(const std::filesystem::path& path);
    static Config from_string(std::string_view text);

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    /// Canonical text form (sorted keys); hashed into run manifests.
    std::string to_string() const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace fitcrf
