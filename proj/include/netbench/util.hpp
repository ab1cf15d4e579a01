#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace netbench {

// ---- IPv4 helpers (addresses kept as host-order uint32) ----

std::optional<uint32_t> parse_ipv4(std::string_view text);
std::string format_ipv4(uint32_t addr);

/// Dotted netmask -> prefix length. Non-contiguous masks yield nullopt.
std::optional<int> mask_to_prefix(uint32_t mask);
uint32_t prefix_to_mask(int prefix_len);
uint32_t network_of(uint32_t addr, int prefix_len);

// ---- number formatting ----

/// Fixed 6 fractional digits, locale independent ("1.200000").
std::string format_fixed6(double v);

/// Shortest representation that round-trips exactly ("0.001", "12").
std::string format_shortest(double v);

std::optional<double> parse_double(std::string_view text);
std::optional<uint64_t> parse_u64(std::string_view text);
std::optional<int64_t> parse_i64(std::string_view text);

// ---- file helpers ----

std::string read_file(const std::string& path);

/// Writes via a temporary file in the same directory, then renames.
void write_file_atomic(const std::string& path, const std::string& content);

// ---- small string utilities ----

std::vector<std::string> split_ws(std::string_view line);
std::string strip_comment(std::string_view line);

}  // namespace netbench
