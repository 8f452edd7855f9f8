#include "fitcrf/hash.hpp"

#include <array>
#include <charconv>
#include <fstream>

#include "fitcrf/error.hpp"

namespace fitcrf {

std::uint64_t hash_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file for hashing: " + path.string());
    std::uint64_t h = 0xCBF29CE484222325ull;
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), buf.size());
        h = fnv1a64(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())), h);
    }
    return h;
}

std::string to_hex(std::uint64_t h) {
    char buf[17] = {};
    for (int i = 15; i >= 0; --i) {
        buf[i] = "0123456789abcdef"[h & 0xF];
        h >>= 4;
    }
    return std::string(buf, 16);
}

}  // namespace fitcrf
