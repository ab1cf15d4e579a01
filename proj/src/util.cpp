#include "netbench/util.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "netbench/errors.hpp"

namespace netbench {

std::optional<uint32_t> parse_ipv4(std::string_view text) {
    uint32_t addr = 0;
    int octets = 0;
    size_t pos = 0;
    while (octets < 4) {
        size_t dot = text.find('.', pos);
        std::string_view part = (dot == std::string_view::npos)
                                    ? text.substr(pos)
                                    : text.substr(pos, dot - pos);
        if (part.empty() || part.size() > 3) return std::nullopt;
        unsigned value = 0;
        auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
        if (ec != std::errc{} || p != part.data() + part.size() || value > 255) return std::nullopt;
        addr = (addr << 8) | value;
        ++octets;
        if (dot == std::string_view::npos) {
            pos = text.size();
            break;
        }
        pos = dot + 1;
    }
    if (octets != 4 || pos != text.size()) return std::nullopt;
    return addr;
}

std::string format_ipv4(uint32_t addr) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", (addr >> 24) & 0xff, (addr >> 16) & 0xff,
                  (addr >> 8) & 0xff, addr & 0xff);
    return buf;
}

std::optional<int> mask_to_prefix(uint32_t mask) {
    int len = 0;
    uint32_t m = mask;
    while (len < 32 && (m & 0x80000000u)) {
        m <<= 1;
        ++len;
    }
    if (m != 0) return std::nullopt;  // a zero bit above a one bit
    return len;
}

uint32_t prefix_to_mask(int prefix_len) {
    if (prefix_len <= 0) return 0;
    if (prefix_len >= 32) return 0xffffffffu;
    return ~((1u << (32 - prefix_len)) - 1);
}

uint32_t network_of(uint32_t addr, int prefix_len) {
    return addr & prefix_to_mask(prefix_len);
}

std::string format_fixed6(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
    return std::string(buf, p - buf);
}

std::string format_shortest(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p - buf);
}

std::optional<double> parse_double(std::string_view text) {
    double value = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || p != text.data() + text.size()) return std::nullopt;
    return value;
}

std::optional<uint64_t> parse_u64(std::string_view text) {
    uint64_t value = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || p != text.data() + text.size()) return std::nullopt;
    return value;
}

std::optional<int64_t> parse_i64(std::string_view text) {
    int64_t value = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || p != text.data() + text.size()) return std::nullopt;
    return value;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("write failed for '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename '" + tmp + "' -> '" + path + "': " + ec.message());
}

std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.emplace_back(line.substr(start, i - start));
    }
    return out;
}

std::string strip_comment(std::string_view line) {
    size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    return std::string(line);
}

}  // namespace netbench
