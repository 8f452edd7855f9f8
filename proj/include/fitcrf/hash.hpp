#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace fitcrf {

// FNV-1a 64-bit. Used for the run-manifest content hashes; this is an audit
// fingerprint for reproducibility comparisons, not a cryptographic digest.

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xCBF29CE484222325ull) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

std::uint64_t hash_file(const std::filesystem::path& path);

std::string to_hex(std::uint64_t h);

}  // namespace fitcrf
